//! Desk-scale reproductions of the evaluation protocols: three-way splits,
//! subgroup injection with IoU recovery, synthetic skew surfaces, and the
//! pruning benchmark.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::bitset::Bitset;
use crate::dataset::{cover, extract, Attribute, ColumnData, Dataset, Pattern, SelectorTable};
use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::metrics::{self, LabeledScoreSet};
use crate::scoring::{self, Direction, ScoringSpec};
use crate::search::{mine, ResultSet, SearchConfig};

fn subseed(seed: u64, tag: u64, index: u64) -> u64 {
    // Stable splitmix-style mixing for independent substreams.
    let mut z = seed
        .wrapping_add(tag.wrapping_mul(0x9e3779b97f4a7c15))
        .wrapping_add(index.wrapping_mul(0xbf58476d1ce4e5b9));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Partition into three disjoint, exhaustive parts whose sizes differ by at
/// most one: (train, search, validation). The train part is passed through
/// untouched; model training is outside this crate.
pub fn split3(ds: &Dataset, seed: u64) -> Result<(Dataset, Dataset, Dataset)> {
    let n = ds.len();
    if n < 3 {
        return Err(Error::InvalidConfig(format!(
            "three-way split needs at least 3 rows, got {n}"
        )));
    }
    let mut rows: Vec<usize> = (0..n).collect();
    rows.shuffle(&mut ChaCha8Rng::seed_from_u64(subseed(seed, 1, 0)));
    let a = n.div_ceil(3);
    let b = (n - a).div_ceil(2);
    Ok((
        ds.select_rows(&rows[..a]),
        ds.select_rows(&rows[a..a + b]),
        ds.select_rows(&rows[a + b..]),
    ))
}

/// Copy of the dataset with predicted scores multiplied by -1 on exactly the
/// covered instances.
pub fn inject(ds: &Dataset, covered: &Bitset) -> Result<Dataset> {
    ds.with_negated_scores(covered)
}

/// Uniformly pick a pattern of length <= `len_max` whose cover size falls
/// within [frac_lo, frac_hi] of the dataset.
pub fn pick_injectable(
    ds: &Dataset,
    table: &SelectorTable,
    seed: u64,
    len_max: usize,
    frac_lo: f64,
    frac_hi: f64,
) -> Result<Pattern> {
    let candidates = injectable_candidates(ds, table, len_max, frac_lo, frac_hi);
    if candidates.is_empty() {
        return Err(Error::NoInjectableCandidate);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(subseed(seed, 2, 0));
    let idx = rng.random_range(0..candidates.len());
    Ok(candidates[idx].clone())
}

/// All patterns of length <= `len_max` with cover size in the band, in
/// canonical enumeration order.
pub fn injectable_candidates(
    ds: &Dataset,
    table: &SelectorTable,
    len_max: usize,
    frac_lo: f64,
    frac_hi: f64,
) -> Vec<Pattern> {
    let n = ds.len();
    let lo = (frac_lo * n as f64).ceil() as usize;
    let hi = (frac_hi * n as f64).floor() as usize;
    let mut out = Vec::new();
    // Depth-first canonical enumeration; covers below `lo` cannot recover.
    let mut stack: Vec<(Vec<u32>, Bitset)> = vec![(Vec::new(), Bitset::ones(n))];
    while let Some((ids, cov)) = stack.pop() {
        if ids.len() >= len_max {
            continue;
        }
        let from = ids.last().map_or(0, |&id| id + 1);
        for id in from..table.len() as u32 {
            if ids
                .iter()
                .any(|&q| table.attribute_of(q) == table.attribute_of(id))
            {
                continue;
            }
            let child_cov = cov.and(table.rows_of(id));
            let size = child_cov.count_ones();
            if size < lo {
                continue;
            }
            let mut child = ids.clone();
            child.push(id);
            if size <= hi {
                out.push(Pattern::from_sorted_ids(child.clone()));
            }
            stack.push((child, child_cov));
        }
    }
    out.sort();
    out
}

/// Intersection over union of two covers; 0/0 is defined as 0.
pub fn iou(a: &Bitset, b: &Bitset) -> f64 {
    let union = a.union_count(b);
    if union == 0 {
        0.0
    } else {
        a.intersect_count(b) as f64 / union as f64
    }
}

/// Mean IoU over all unordered pairs of covers; None for fewer than two.
pub fn mean_pairwise_iou(covers: &[Bitset]) -> Option<f64> {
    if covers.len() < 2 {
        return None;
    }
    let mut sum = 0.0;
    let mut pairs = 0usize;
    for i in 0..covers.len() {
        for j in (i + 1)..covers.len() {
            sum += iou(&covers[i], &covers[j]);
            pairs += 1;
        }
    }
    Some(sum / pairs as f64)
}

/// Draw a labeled score multiset from a bivariate standard normal with the
/// given correlation: the first variable thresholded at its empirical
/// q-quantile yields the labels (so the negative class ratio is exactly the
/// rounded q), the second variable provides the scores.
pub fn synth_skew(corr: f64, size: usize, q: f64, seed: u64) -> Result<LabeledScoreSet> {
    assert!((-1.0..=1.0).contains(&corr), "correlation out of range");
    assert!(q > 0.0 && q < 1.0, "quantile out of range");
    let negatives = (q * size as f64).round() as usize;
    if negatives == 0 || negatives >= size {
        return Err(Error::DegenerateSample { size, q });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(subseed(seed, 3, 0));
    let mut z = Vec::with_capacity(size);
    let mut scores = Vec::with_capacity(size);
    let residual = (1.0 - corr * corr).sqrt();
    for _ in 0..size {
        let zi: f64 = StandardNormal.sample(&mut rng);
        let ei: f64 = StandardNormal.sample(&mut rng);
        z.push(zi);
        scores.push(corr * zi + residual * ei);
    }
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_unstable_by(|&a, &b| z[a].total_cmp(&z[b]));
    let mut labels = vec![0u8; size];
    for &i in &order[negatives..] {
        labels[i] = 1;
    }
    LabeledScoreSet::new(labels, scores)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkewAxis {
    CoverSize,
    Ncr,
}

impl SkewAxis {
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "cover_size" => Ok(SkewAxis::CoverSize),
            "ncr" => Ok(SkewAxis::Ncr),
            other => Err(Error::InvalidConfig(format!(
                "unknown skew axis {other:?} (expected cover_size or ncr)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SkewAxis::CoverSize => "cover_size",
            SkewAxis::Ncr => "ncr",
        }
    }
}

/// One grid cell of a skew surface: the mean relative (optionally weighted)
/// score of samples at (corr, axis value) against the fixed reference setting
/// (correlation 0, size 100, q = 0.5).
#[derive(Debug, Clone, PartialEq)]
pub struct SkewCell {
    pub corr: f64,
    pub axis_value: f64,
    pub mean_score: f64,
    pub std_dev: f64,
    pub repeats: usize,
}

pub const SKEW_REFERENCE_SIZE: usize = 100;
pub const SKEW_REFERENCE_Q: f64 = 0.5;

/// Parameters of one skew-surface sweep.
pub struct SkewSurfaceSpec<'a> {
    pub measure: &'static dyn Measure,
    pub axis: SkewAxis,
    pub corrs: &'a [f64],
    pub values: &'a [f64],
    pub repeats: usize,
    /// Cover-size weight exponent applied to the sampled cell.
    pub alpha: f64,
    /// Class-balance weight exponent applied to the sampled cell.
    pub beta: f64,
    pub seed: u64,
}

/// Sweep a grid of (correlation, axis value) cells. Along `CoverSize` the
/// sample size varies with q fixed at 0.5; along `Ncr` the quantile varies
/// with size fixed at 100. Scores average over `repeats` independent draws,
/// each compared against that repeat's reference sample.
pub fn skew_surface(spec: &SkewSurfaceSpec) -> Result<Vec<SkewCell>> {
    assert!(spec.repeats >= 1);
    let measure = spec.measure;
    let seed = spec.seed;
    let refs: Vec<LabeledScoreSet> = (0..spec.repeats)
        .map(|r| {
            synth_skew(
                0.0,
                SKEW_REFERENCE_SIZE,
                SKEW_REFERENCE_Q,
                subseed(seed, 4, r as u64),
            )
        })
        .collect::<Result<_>>()?;
    let ref_values: Vec<f64> = refs
        .iter()
        .map(|s| measure.evaluate(s))
        .collect::<Result<_>>()?;

    let mut cells: Vec<(usize, f64, f64)> = Vec::new();
    for (ci, &corr) in spec.corrs.iter().enumerate() {
        for (vi, &value) in spec.values.iter().enumerate() {
            cells.push(((ci * spec.values.len() + vi), corr, value));
        }
    }
    let results: Vec<Result<SkewCell>> = cells
        .par_iter()
        .map(|&(cell_idx, corr, value)| {
            let (size, q) = match spec.axis {
                SkewAxis::CoverSize => (value as usize, SKEW_REFERENCE_Q),
                SkewAxis::Ncr => (SKEW_REFERENCE_SIZE, value),
            };
            let mut scores = Vec::with_capacity(spec.repeats);
            for (r, &ref_value) in ref_values.iter().enumerate() {
                // Cell tags live above 1000 to stay clear of the fixed tags.
                let sample = synth_skew(
                    corr,
                    size,
                    q,
                    subseed(seed, 1000 + cell_idx as u64, r as u64),
                )?;
                if !measure.is_defined(&sample) {
                    return Err(Error::UndefinedMeasure {
                        measure: measure.name(),
                        reason: "skew sample lost a class; adjust the grid",
                    });
                }
                let rel = scoring::relative_score(measure, &sample, ref_value, Direction::Under)?;
                let w = metrics::weight(&sample, spec.alpha, spec.beta);
                scores.push(w * rel);
            }
            let mean = scores.iter().sum::<f64>() / spec.repeats as f64;
            let var =
                scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / spec.repeats as f64;
            Ok(SkewCell {
                corr,
                axis_value: value,
                mean_score: mean,
                std_dev: var.sqrt(),
                repeats: spec.repeats,
            })
        })
        .collect();
    results.into_iter().collect()
}

/// One cell of the pruning benchmark: paired searches with and without
/// optimistic-estimate pruning.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub measure: &'static str,
    pub weight: f64,
    pub median_secs_pruned: f64,
    pub median_secs_unpruned: f64,
    pub speedup: f64,
    pub evaluated_pruned: u64,
    pub evaluated_unpruned: u64,
    pub identical_results: bool,
}

/// Measure runtimes and node counts of subgroup discovery with and without
/// pruning across (measure, alpha=beta) cells, asserting result equality.
pub fn bench_pruning(
    ds: &Dataset,
    table: &SelectorTable,
    measures: &[&'static dyn Measure],
    weights: &[f64],
    repeats: usize,
    base: &SearchConfig,
) -> Result<Vec<BenchRow>> {
    assert!(repeats >= 1);
    let mut rows = Vec::new();
    for &m in measures {
        for &w in weights {
            let mut cfg = *base;
            cfg.spec = ScoringSpec::new(m, w, w)
                .gen_aware(base.spec.generalization_aware)
                .direction(base.spec.direction);
            let mut secs_p = Vec::new();
            let mut secs_u = Vec::new();
            let mut last: Option<(ResultSet, ResultSet)> = None;
            for _ in 0..repeats {
                cfg.pruning = true;
                let rp = mine(ds, table, &cfg)?;
                cfg.pruning = false;
                let ru = mine(ds, table, &cfg)?;
                secs_p.push(rp.stats.wall.as_secs_f64());
                secs_u.push(ru.stats.wall.as_secs_f64());
                last = Some((rp, ru));
            }
            let (rp, ru) = last.expect("at least one repeat");
            let mp = median(&mut secs_p);
            let mu = median(&mut secs_u);
            rows.push(BenchRow {
                measure: m.name(),
                weight: w,
                median_secs_pruned: mp,
                median_secs_unpruned: mu,
                speedup: if mp > 0.0 { mu / mp } else { f64::INFINITY },
                evaluated_pruned: rp.stats.evaluated,
                evaluated_unpruned: ru.stats.evaluated,
                identical_results: rp.same_entries(&ru),
            });
        }
    }
    Ok(rows)
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

/// Synthetic tabular benchmark data for the injection protocol: six
/// attributes, labels from a latent score plus noise, predictions a noisy
/// monotone function of the same latent. Prediction noise is much higher
/// inside one segment, so mined extremes cluster in drill-down chains there.
/// The `city` attribute refines `group` (every city belongs to one group),
/// which yields cover-equal redundant descriptions, and its skewed marginals
/// put sub-percent cells into the depth-3 grid outside the noisy segment.
pub fn synth_injection_dataset(n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(subseed(seed, 6, 0));
    let cities = ["c0", "c1", "c2", "c3", "c4", "c5", "c6", "c7"];
    let city_probs = [0.18, 0.15, 0.12, 0.15, 0.12, 0.08, 0.12, 0.08];
    let city_group = [0usize, 0, 0, 1, 1, 1, 2, 2];
    let city_offset = [-0.55, -0.5, -0.45, 0.0, 0.05, -0.05, 0.5, 0.45];
    let groups = ["g0", "g1", "g2"];
    let segments = ["s0", "s1", "s2", "s3"];
    let segment_probs = [0.3, 0.3, 0.25, 0.15];
    let flags = ["off", "on"];
    let flag_probs = [0.65, 0.35];

    fn draw(rng: &mut ChaCha8Rng, probs: &[f64]) -> usize {
        let u: f64 = rng.random_range(0.0..1.0);
        let mut acc = 0.0;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        probs.len() - 1
    }

    let mut city_codes = Vec::with_capacity(n);
    let mut group_codes = Vec::with_capacity(n);
    let mut segment_codes = Vec::with_capacity(n);
    let mut flag_codes = Vec::with_capacity(n);
    let mut x_main = Vec::with_capacity(n);
    let mut x_side = Vec::with_capacity(n);
    let mut scores = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);

    for _ in 0..n {
        let c = draw(&mut rng, &city_probs);
        let s = draw(&mut rng, &segment_probs);
        let f = draw(&mut rng, &flag_probs);
        let xm: f64 = StandardNormal.sample(&mut rng);
        let xs: f64 = StandardNormal.sample(&mut rng);
        let latent = city_offset[c] + 0.9 * xm + 0.4 * xs + 0.2 * f as f64;
        let label_noise: f64 = StandardNormal.sample(&mut rng);
        let label = u8::from(latent + 0.65 * label_noise > 0.3);
        // Noisier predictions inside segment s3.
        let sigma = if s == 3 { 2.2 } else { 0.4 };
        let score_noise: f64 = StandardNormal.sample(&mut rng);
        city_codes.push(Some(c as u32));
        group_codes.push(Some(city_group[c] as u32));
        segment_codes.push(Some(s as u32));
        flag_codes.push(Some(f as u32));
        x_main.push(xm);
        x_side.push(xs);
        scores.push(latent + sigma * score_noise);
        labels.push(label);
    }

    let attributes = vec![
        Attribute {
            name: "group".into(),
            data: ColumnData::Nominal {
                codes: group_codes,
                values: groups.iter().map(|s| s.to_string()).collect(),
            },
        },
        Attribute {
            name: "city".into(),
            data: ColumnData::Nominal {
                codes: city_codes,
                values: cities.iter().map(|s| s.to_string()).collect(),
            },
        },
        Attribute {
            name: "segment".into(),
            data: ColumnData::Nominal {
                codes: segment_codes,
                values: segments.iter().map(|s| s.to_string()).collect(),
            },
        },
        Attribute {
            name: "x_main".into(),
            data: ColumnData::Numeric(x_main),
        },
        Attribute {
            name: "x_side".into(),
            data: ColumnData::Numeric(x_side),
        },
        Attribute {
            name: "flag".into(),
            data: ColumnData::Nominal {
                codes: flag_codes,
                values: flags.iter().map(|s| s.to_string()).collect(),
            },
        },
    ];

    Dataset::from_parts(attributes, labels, scores, "label", "score")
        .expect("generated data is valid")
}

/// Configuration of one end-to-end injection run.
#[derive(Debug, Clone)]
pub struct InjectionSetup {
    pub n: usize,
    pub seed: u64,
    pub bins: usize,
    pub len_max: usize,
    pub frac_lo: f64,
    pub frac_hi: f64,
    /// Candidates must be at least this well ranked before injection
    /// (ROC AUC of the cover), so negation creates a genuine weakness.
    pub min_pre_auc: f64,
    /// Every drop-one generalization of the candidate must cover at least
    /// this multiple of the candidate's cover, so no single generalization
    /// absorbs the injected weakness.
    pub min_parent_ratio: f64,
    /// Minimum class balance of the candidate's cover.
    pub min_cb: f64,
    /// Every drop-one generalization must itself rank well before injection:
    /// its relative ROC AUC score stays below this bound.
    pub max_parent_rel: f64,
    pub max_pick_attempts: u64,
}

impl Default for InjectionSetup {
    fn default() -> Self {
        InjectionSetup {
            n: 3000,
            seed: 0,
            bins: 5,
            len_max: 3,
            frac_lo: 0.004,
            frac_hi: 0.006,
            min_pre_auc: 0.9,
            min_parent_ratio: 4.5,
            min_cb: 0.25,
            max_parent_rel: 0.15,
            max_pick_attempts: 512,
        }
    }
}

/// A generated dataset with one injected underperforming subgroup.
pub struct InjectedDataset {
    pub dataset: Dataset,
    pub table: SelectorTable,
    pub pattern: Pattern,
    pub cover: Bitset,
    pub pre_roc_auc: f64,
    pub post_roc_auc: f64,
}

/// Generate the synthetic benchmark dataset, pick an injectable pattern whose
/// cover is well ranked beforehand, and negate its scores.
pub fn make_injected_dataset(setup: &InjectionSetup) -> Result<InjectedDataset> {
    let clean = synth_injection_dataset(setup.n, setup.seed);
    inject_into_dataset(&clean, setup)
}

/// Pick an injectable pattern in an existing dataset and negate its cover's
/// scores. Candidates must satisfy the size band and rank well beforehand.
pub fn inject_into_dataset(clean: &Dataset, setup: &InjectionSetup) -> Result<InjectedDataset> {
    let selectors = crate::dataset::generate_selectors(clean, setup.bins);
    let table = SelectorTable::new(clean, selectors);
    let candidates =
        injectable_candidates(clean, &table, setup.len_max, setup.frac_lo, setup.frac_hi);
    if candidates.is_empty() {
        return Err(Error::NoInjectableCandidate);
    }
    let full_auc = metrics::roc_auc(&clean.full_set())?;
    let mut picked = None;
    for attempt in 0..setup.max_pick_attempts {
        let mut rng = ChaCha8Rng::seed_from_u64(subseed(setup.seed, 7, attempt));
        let candidate = &candidates[rng.random_range(0..candidates.len())];
        let cov = cover(candidate, &table);
        let set = extract(&cov, clean);
        if set.positives() < 2 || set.negatives() < 2 {
            continue;
        }
        if metrics::class_balance(&set) < setup.min_cb {
            continue;
        }
        let leaf_size = cov.count_ones();
        let ids = candidate.ids();
        let parents_ok = (0..ids.len()).all(|drop| {
            let parent_ids: Vec<u32> = ids
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != drop)
                .map(|(_, &v)| v)
                .collect();
            let parent = cover(&Pattern::from_sorted_ids(parent_ids), &table);
            if (parent.count_ones() as f64) < setup.min_parent_ratio * leaf_size as f64 {
                return false;
            }
            match metrics::roc_auc(&extract(&parent, clean)) {
                Ok(auc) => full_auc - auc <= setup.max_parent_rel,
                Err(_) => false,
            }
        });
        if !parents_ok {
            continue;
        }
        let pre = metrics::roc_auc(&set)?;
        if pre >= setup.min_pre_auc {
            picked = Some((candidate.clone(), cov, pre));
            break;
        }
    }
    let (pattern, cov, pre) = picked.ok_or(Error::NoInjectableCandidate)?;
    let injected = inject(clean, &cov)?;
    let post = metrics::roc_auc(&extract(&cov, &injected))?;
    let table = table.rebind(&injected);
    Ok(InjectedDataset {
        dataset: injected,
        table,
        pattern,
        cover: cov,
        pre_roc_auc: pre,
        post_roc_auc: post,
    })
}

/// Result of mining an injected dataset under one scoring configuration:
/// per-rank IoU of the result covers against the injected cover.
#[derive(Debug, Clone)]
pub struct InjectionRun {
    pub label: String,
    pub results: ResultSet,
    pub ious: Vec<f64>,
}

/// Mine the injected dataset under each scoring configuration and report the
/// IoU of every result cover against the injected cover.
pub fn run_injection_experiment(
    injected: &InjectedDataset,
    configs: &[(String, SearchConfig)],
) -> Result<Vec<InjectionRun>> {
    let mut out = Vec::new();
    for (label, cfg) in configs {
        let rs = mine(&injected.dataset, &injected.table, cfg)?;
        let ious = rs
            .entries
            .iter()
            .map(|e| iou(&cover(&e.pattern, &injected.table), &injected.cover))
            .collect();
        out.push(InjectionRun {
            label: label.clone(),
            results: rs,
            ious,
        });
    }
    Ok(out)
}
