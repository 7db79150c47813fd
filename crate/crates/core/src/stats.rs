//! Significance machinery: stratified randomization p-values on a validation
//! split, multiple-testing correction, and significance filtering.

use std::collections::BTreeMap;
use std::sync::LazyLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dataset::{cover, extract, Dataset, Pattern, SelectorTable};
use crate::error::{Error, Result};
use crate::metrics::LabeledScoreSet;
use crate::scoring::{self, Direction, ScoringSpec};
use crate::search::ResultSet;

/// Multiple-testing correction strategy.
pub trait Correction: Send + Sync {
    fn name(&self) -> &'static str;
    /// Adjusted p-values, same order as the input.
    fn adjust(&self, pvalues: &[f64]) -> Vec<f64>;
}

/// Benjamini-Yekutieli step-up, valid under arbitrary dependency.
pub struct BenjaminiYekutieli;

impl Correction for BenjaminiYekutieli {
    fn name(&self) -> &'static str {
        "by"
    }

    fn adjust(&self, pvalues: &[f64]) -> Vec<f64> {
        by_correct(pvalues)
    }
}

/// Bonferroni: adjusted p = min(1, m*p).
pub struct Bonferroni;

impl Correction for Bonferroni {
    fn name(&self) -> &'static str {
        "bonferroni"
    }

    fn adjust(&self, pvalues: &[f64]) -> Vec<f64> {
        let m = pvalues.len() as f64;
        pvalues.iter().map(|&p| (p * m).min(1.0)).collect()
    }
}

/// No correction.
pub struct NoCorrection;

impl Correction for NoCorrection {
    fn name(&self) -> &'static str {
        "none"
    }

    fn adjust(&self, pvalues: &[f64]) -> Vec<f64> {
        pvalues.to_vec()
    }
}

static CORRECTIONS: LazyLock<BTreeMap<&'static str, &'static dyn Correction>> =
    LazyLock::new(|| {
        let mut m: BTreeMap<&'static str, &'static dyn Correction> = BTreeMap::new();
        for c in [
            &BenjaminiYekutieli as &'static dyn Correction,
            &Bonferroni,
            &NoCorrection,
        ] {
            m.insert(c.name(), c);
        }
        m
    });

pub fn correction_by_name(name: &str) -> Result<&'static dyn Correction> {
    CORRECTIONS
        .get(name)
        .copied()
        .ok_or_else(|| Error::UnknownCorrection(name.to_string()))
}

pub fn correction_names() -> Vec<&'static str> {
    CORRECTIONS.keys().copied().collect()
}

/// Benjamini-Yekutieli step-up adjustment with c(m) = sum_{k=1..m} 1/k:
/// adjusted p_(i) = min_{j >= i} min(1, p_(j) * m * c(m) / j) on the sorted
/// sequence, mapped back to input order.
pub fn by_correct(pvalues: &[f64]) -> Vec<f64> {
    let m = pvalues.len();
    if m == 0 {
        return Vec::new();
    }
    let cm: f64 = (1..=m).map(|k| 1.0 / k as f64).sum();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| pvalues[a].total_cmp(&pvalues[b]));
    let mut adjusted = vec![0.0; m];
    let mut running_min = 1.0f64;
    for rank in (0..m).rev() {
        let idx = order[rank];
        let raw = pvalues[idx] * m as f64 * cm / (rank + 1) as f64;
        running_min = running_min.min(raw.min(1.0));
        adjusted[idx] = running_min;
    }
    adjusted
}

#[derive(Clone)]
pub struct SignificanceConfig {
    pub n_resamples: usize,
    pub correction: &'static dyn Correction,
    /// Significance threshold on adjusted p-values.
    pub alpha: f64,
    /// Search width: the filter expects a result set of at most k' patterns.
    pub k_prime: usize,
    /// Final result size after filtering.
    pub k: usize,
    pub seed: u64,
    /// Use (r+1)/(n+1) instead of the plain r/n estimate.
    pub plus_one: bool,
}

impl std::fmt::Debug for SignificanceConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SignificanceConfig")
            .field("n_resamples", &self.n_resamples)
            .field("correction", &self.correction.name())
            .field("alpha", &self.alpha)
            .field("k_prime", &self.k_prime)
            .field("k", &self.k)
            .field("seed", &self.seed)
            .field("plus_one", &self.plus_one)
            .finish()
    }
}

impl Default for SignificanceConfig {
    fn default() -> Self {
        SignificanceConfig {
            n_resamples: 1000,
            correction: &BenjaminiYekutieli,
            alpha: 0.05,
            k_prime: 100,
            k: 5,
            seed: 0,
            plus_one: false,
        }
    }
}

impl SignificanceConfig {
    fn validate(&self) -> Result<()> {
        if self.n_resamples == 0 {
            return Err(Error::InvalidConfig(
                "n_resamples must be at least 1".into(),
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig("alpha must lie in (0, 1)".into()));
        }
        if self.k > self.k_prime {
            return Err(Error::InvalidConfig("k must not exceed k_prime".into()));
        }
        Ok(())
    }
}

/// Outcome of one pattern's randomization test.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternTest {
    pub statistic: f64,
    pub p_value: f64,
    pub resamples: usize,
}

/// Patterns whose validation cover cannot be tested (empty, measure undefined,
/// or larger than the validation strata) are flagged instead of tested.
#[derive(Debug, Clone, PartialEq)]
pub enum TestOutcome {
    Tested(PatternTest),
    Untestable { reason: String },
}

// Stable 64-bit FNV-1a so per-pattern substreams are reproducible across runs
// and platforms regardless of evaluation order.
fn substream_seed(seed: u64, ids: &[u32]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    let mut eat = |byte: u8| {
        h ^= byte as u64;
        h = h.wrapping_mul(0x100000001b3);
    };
    for b in seed.to_le_bytes() {
        eat(b);
    }
    for &id in ids {
        for b in id.to_le_bytes() {
            eat(b);
        }
    }
    h
}

/// Empirical p-value of a pattern on the validation split.
///
/// The statistic is the unweighted relative score of the pattern's validation
/// cover. Resampling draws subsets of the validation split without
/// replacement, stratified to the cover's exact positive and negative counts;
/// the p-value is the fraction of draws whose statistic is at least the
/// pattern's.
pub fn empirical_p_value(
    pattern: &Pattern,
    validation: &Dataset,
    table: &SelectorTable,
    spec: &ScoringSpec,
    cfg: &SignificanceConfig,
) -> Result<TestOutcome> {
    cfg.validate()?;
    let full_set = validation.full_set();
    let full_value = spec.measure.evaluate(&full_set)?;
    let c = cover(pattern, table);
    let set = extract(&c, validation);
    if set.is_empty() {
        return Ok(TestOutcome::Untestable {
            reason: "empty cover on the validation split".into(),
        });
    }
    if !spec.measure.is_defined(&set) {
        return Ok(TestOutcome::Untestable {
            reason: format!(
                "measure {} undefined on the validation cover",
                spec.measure.name()
            ),
        });
    }
    resampled_p_value(
        &set,
        validation,
        spec.measure,
        spec.direction,
        full_value,
        cfg,
        pattern.ids(),
    )
}

fn resampled_p_value(
    set: &LabeledScoreSet,
    validation: &Dataset,
    measure: &dyn crate::measure::Measure,
    direction: Direction,
    full_value: f64,
    cfg: &SignificanceConfig,
    ids: &[u32],
) -> Result<TestOutcome> {
    let statistic = scoring::relative_score(measure, set, full_value, direction)?;
    let need_pos = set.positives();
    let need_neg = set.negatives();

    let mut pos_idx = Vec::new();
    let mut neg_idx = Vec::new();
    for (i, &y) in validation.labels().iter().enumerate() {
        if y == 1 {
            pos_idx.push(i);
        } else {
            neg_idx.push(i);
        }
    }
    if need_pos > pos_idx.len() || need_neg > neg_idx.len() {
        return Ok(TestOutcome::Untestable {
            reason: format!(
                "cannot stratify: cover needs {need_pos} positives / {need_neg} negatives, validation has {} / {}",
                pos_idx.len(),
                neg_idx.len()
            ),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(cfg.seed, ids));
    let mut at_least = 0usize;
    let mut labels = Vec::with_capacity(need_pos + need_neg);
    let mut scores = Vec::with_capacity(need_pos + need_neg);
    for _ in 0..cfg.n_resamples {
        labels.clear();
        scores.clear();
        for i in rand::seq::index::sample(&mut rng, pos_idx.len(), need_pos) {
            let row = pos_idx[i];
            labels.push(1u8);
            scores.push(validation.scores()[row]);
        }
        for i in rand::seq::index::sample(&mut rng, neg_idx.len(), need_neg) {
            let row = neg_idx[i];
            labels.push(0u8);
            scores.push(validation.scores()[row]);
        }
        debug_assert_eq!(labels.iter().filter(|&&y| y == 1).count(), need_pos);
        let resample =
            LabeledScoreSet::new(labels.clone(), scores.clone()).expect("stratified draw is valid");
        let value = scoring::relative_score(measure, &resample, full_value, direction)
            .expect("strata match the tested cover, so definedness carries over");
        if value >= statistic {
            at_least += 1;
        }
    }
    let p_value = if cfg.plus_one {
        (at_least + 1) as f64 / (cfg.n_resamples + 1) as f64
    } else {
        at_least as f64 / cfg.n_resamples as f64
    };
    Ok(TestOutcome::Tested(PatternTest {
        statistic,
        p_value,
        resamples: cfg.n_resamples,
    }))
}

/// One row of the significance report.
#[derive(Debug, Clone)]
pub struct SignificanceRow {
    pub pattern: Pattern,
    pub interestingness: f64,
    pub statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub adjusted_p: Option<f64>,
    pub significant: bool,
    pub resamples: usize,
    pub untestable_reason: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SignificanceReport {
    pub rows: Vec<SignificanceRow>,
    /// Size of the tested result set (k').
    pub tested: usize,
    /// Patterns passing the adjusted threshold.
    pub significant: usize,
    /// Patterns kept after top-k filtering.
    pub filtered: usize,
}

/// Filter a mined result set by significance on the validation split: test all
/// patterns, correct jointly, keep those with adjusted p <= alpha, and return
/// the k best by original interestingness.
pub fn significance_filter(
    results: &ResultSet,
    validation: &Dataset,
    validation_table: &SelectorTable,
    spec: &ScoringSpec,
    cfg: &SignificanceConfig,
) -> Result<(ResultSet, SignificanceReport)> {
    cfg.validate()?;
    let outcomes: Vec<Result<TestOutcome>> = results
        .entries
        .par_iter()
        .map(|entry| empirical_p_value(&entry.pattern, validation, validation_table, spec, cfg))
        .collect();

    let mut rows = Vec::with_capacity(results.entries.len());
    let mut tested_idx = Vec::new();
    let mut raw_p = Vec::new();
    for (i, (entry, outcome)) in results.entries.iter().zip(outcomes).enumerate() {
        match outcome? {
            TestOutcome::Tested(t) => {
                tested_idx.push(i);
                raw_p.push(t.p_value);
                rows.push(SignificanceRow {
                    pattern: entry.pattern.clone(),
                    interestingness: entry.interestingness,
                    statistic: Some(t.statistic),
                    p_value: Some(t.p_value),
                    adjusted_p: None,
                    significant: false,
                    resamples: t.resamples,
                    untestable_reason: None,
                });
            }
            TestOutcome::Untestable { reason } => {
                rows.push(SignificanceRow {
                    pattern: entry.pattern.clone(),
                    interestingness: entry.interestingness,
                    statistic: None,
                    p_value: None,
                    adjusted_p: None,
                    significant: false,
                    resamples: 0,
                    untestable_reason: Some(reason),
                });
            }
        }
    }

    let adjusted = cfg.correction.adjust(&raw_p);
    for (&i, &adj) in tested_idx.iter().zip(&adjusted) {
        rows[i].adjusted_p = Some(adj);
        rows[i].significant = adj <= cfg.alpha;
    }

    let significant = rows.iter().filter(|r| r.significant).count();
    // Result entries are already sorted by interestingness; keep order.
    let kept: Vec<_> = results
        .entries
        .iter()
        .zip(&rows)
        .filter(|(_, row)| row.significant)
        .map(|(entry, _)| entry.clone())
        .take(cfg.k)
        .collect();
    let filtered = kept.len();

    Ok((
        ResultSet {
            entries: kept,
            stats: results.stats.clone(),
        },
        SignificanceReport {
            rows,
            tested: results.entries.len(),
            significant,
            filtered,
        },
    ))
}
