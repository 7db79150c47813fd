//! Interestingness scoring: relative scores, size/balance weighting, and
//! generalization awareness.

use std::collections::HashMap;

use crate::error::Result;
use crate::measure::{Measure, MeasureKind};
use crate::metrics::{self, LabeledScoreSet};

/// Search orientation. Underperformance assigns positive scores to subgroups
/// on which the model does worse than on the whole dataset; overperformance
/// negates the relative scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    #[default]
    Under,
    Over,
}

impl Direction {
    pub fn name(&self) -> &'static str {
        match self {
            Direction::Under => "under",
            Direction::Over => "over",
        }
    }
}

/// Which scoring function to run: base measure, weighting exponents, and
/// whether generalization-aware adjustment applies.
#[derive(Clone, Copy)]
pub struct ScoringSpec {
    pub measure: &'static dyn Measure,
    pub alpha: f64,
    pub beta: f64,
    pub generalization_aware: bool,
    pub direction: Direction,
}

impl ScoringSpec {
    pub fn new(measure: &'static dyn Measure, alpha: f64, beta: f64) -> Self {
        assert!(
            alpha.is_finite() && alpha >= 0.0 && beta.is_finite() && beta >= 0.0,
            "weight exponents must be finite and non-negative"
        );
        ScoringSpec {
            measure,
            alpha,
            beta,
            generalization_aware: false,
            direction: Direction::Under,
        }
    }

    pub fn gen_aware(mut self, on: bool) -> Self {
        self.generalization_aware = on;
        self
    }

    pub fn direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }
}

impl std::fmt::Debug for ScoringSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScoringSpec")
            .field("measure", &self.measure.name())
            .field("alpha", &self.alpha)
            .field("beta", &self.beta)
            .field("generalization_aware", &self.generalization_aware)
            .field("direction", &self.direction)
            .finish()
    }
}

/// Relative score of a cover against the full-dataset value: positive means
/// the cover underperforms (for `Direction::Under`).
pub fn relative_score(
    measure: &dyn Measure,
    cover: &LabeledScoreSet,
    full_value: f64,
    direction: Direction,
) -> Result<f64> {
    let value = measure.evaluate(cover)?;
    let rel = match measure.kind() {
        MeasureKind::Loss => value - full_value,
        MeasureKind::Score => full_value - value,
    };
    Ok(match direction {
        Direction::Under => rel,
        Direction::Over => -rel,
    })
}

/// Size- and balance-weighted relative score.
pub fn weighted_score(spec: &ScoringSpec, cover: &LabeledScoreSet, full_value: f64) -> Result<f64> {
    let rel = relative_score(spec.measure, cover, full_value, spec.direction)?;
    Ok(metrics::weight(cover, spec.alpha, spec.beta) * rel)
}

/// Generalization-aware score: the weighted score minus the maximum weighted
/// score across all strict generalizations.
pub fn gen_aware_score(weighted: f64, best_generalization: f64) -> f64 {
    weighted - best_generalization
}

/// Memo of weighted generalization scores keyed by sorted selector-id sets.
///
/// Values follow the conventions the scoring functions need: the empty pattern
/// scores 0 (its relative score is zero by definition), and generalizations
/// whose measure is undefined on their cover contribute 0.
#[derive(Default)]
pub struct GenScoreCache {
    // (weighted score, max weighted score over strict subsets)
    entries: HashMap<Vec<u32>, (f64, f64)>,
}

impl GenScoreCache {
    pub fn new() -> Self {
        GenScoreCache {
            entries: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Maximum weighted score over all strict generalizations of `ids`
    /// (including the empty pattern, which scores 0).
    ///
    /// `weighted_of` resolves the weighted score of a generalization's cover;
    /// it is consulted once per distinct id set.
    pub fn best_generalization<F>(&mut self, ids: &[u32], weighted_of: &mut F) -> f64
    where
        F: FnMut(&[u32]) -> f64,
    {
        debug_assert!(!ids.is_empty(), "empty pattern has no generalizations");
        self.best_over_drop_one(ids, weighted_of)
    }

    fn resolve<F>(&mut self, ids: &[u32], weighted_of: &mut F) -> (f64, f64)
    where
        F: FnMut(&[u32]) -> f64,
    {
        if let Some(&entry) = self.entries.get(ids) {
            return entry;
        }
        let entry = if ids.is_empty() {
            (0.0, f64::NEG_INFINITY)
        } else {
            let w = weighted_of(ids);
            let b = self.best_over_drop_one(ids, weighted_of);
            (w, b)
        };
        self.entries.insert(ids.to_vec(), entry);
        entry
    }

    // Max over all strict subsets, reached by recursing on drop-one subsets.
    fn best_over_drop_one<F>(&mut self, ids: &[u32], weighted_of: &mut F) -> f64
    where
        F: FnMut(&[u32]) -> f64,
    {
        let mut best = f64::NEG_INFINITY;
        let mut sub = Vec::with_capacity(ids.len() - 1);
        for drop in 0..ids.len() {
            sub.clear();
            sub.extend(
                ids.iter()
                    .enumerate()
                    .filter(|&(i, _)| i != drop)
                    .map(|(_, &v)| v),
            );
            let (w, b) = self.resolve(&sub, weighted_of);
            best = best.max(w).max(b);
        }
        best
    }
}
