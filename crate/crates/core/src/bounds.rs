//! Extremal subset values and optimistic estimates.
//!
//! For each measure these give the exact extreme a subset of the input can
//! reach: the maximum per-positive ranking penalty for ARL, the three-case
//! lower bound for ROC AUC, and the worst-curve PR AUC obtained by keeping one
//! minimally scored positive together with all negatives. Combined with the
//! weight bound they yield sound upper bounds on every specialization's score.

use crate::error::{Error, Result};
use crate::measure::{Measure, MeasureKind};
use crate::metrics::{self, LabeledScoreSet};
use crate::scoring::Direction;

fn undefined(measure: &'static str, reason: &'static str) -> Error {
    Error::UndefinedMeasure { measure, reason }
}

/// Maximum ranking penalty over the positive instances. A subset consisting of
/// the minimally scored positive plus the negatives at or above it attains an
/// ARL equal to this value, so it bounds the ARL of every subset.
pub fn max_pen(s: &LabeledScoreSet) -> Result<f64> {
    let min_pos = s
        .min_positive_score()
        .ok_or_else(|| undefined("arl", "no positive instance"))?;
    // pen is non-increasing in the score, so the lowest positive attains it.
    let mut above = 0u64;
    let mut tied = 0u64;
    for (&y, &sc) in s.labels().iter().zip(s.scores()) {
        if y == 0 {
            if sc > min_pos {
                above += 1;
            } else if sc == min_pos {
                tied += 1;
            }
        }
    }
    Ok(above as f64 + tied as f64 / 2.0)
}

/// Optimistic estimate for the relative ARL score of every specialization:
/// the maximum ranking penalty minus the full-dataset ARL.
pub fn oe_arl(s: &LabeledScoreSet, arl_full: f64) -> Result<f64> {
    Ok(max_pen(s)? - arl_full)
}

/// Minimum ROC AUC over all subsets containing both classes: 1 when every
/// positive strictly outranks every negative, 1/2 when no strict inversion
/// exists but ties do, 0 otherwise.
pub fn lb_roc_auc(s: &LabeledScoreSet) -> Result<f64> {
    let (min_pos, max_neg) = match (s.min_positive_score(), s.max_negative_score()) {
        (Some(p), Some(n)) => (p, n),
        _ => return Err(undefined("roc_auc", "needs both classes")),
    };
    Ok(if min_pos > max_neg {
        1.0
    } else if min_pos == max_neg {
        0.5
    } else {
        0.0
    })
}

/// Maximum ROC AUC over all subsets containing both classes; the mirror image
/// of `lb_roc_auc`.
pub fn ub_roc_auc(s: &LabeledScoreSet) -> Result<f64> {
    let (max_pos, min_neg) = match (s.max_positive_score(), s.min_negative_score()) {
        (Some(p), Some(n)) => (p, n),
        _ => return Err(undefined("roc_auc", "needs both classes")),
    };
    Ok(if max_pos > min_neg {
        1.0
    } else if max_pos == min_neg {
        0.5
    } else {
        0.0
    })
}

/// Minimum PR AUC over all subsets with at least one positive: the PR AUC of
/// {one positive of minimal score} ∪ {all negatives}. Tied minimal positives
/// contribute exactly one instance.
pub fn lb_pr_auc(s: &LabeledScoreSet) -> Result<f64> {
    let min_pos = s
        .min_positive_score()
        .ok_or_else(|| undefined("pr_auc", "no positive instance"))?;
    let mut labels = vec![1u8];
    let mut scores = vec![min_pos];
    for (&y, &sc) in s.labels().iter().zip(s.scores()) {
        if y == 0 {
            labels.push(0);
            scores.push(sc);
        }
    }
    let worst = LabeledScoreSet::new(labels, scores).expect("worst set is valid");
    metrics::pr_auc(&worst)
}

/// Upper bound on the combined weight over all subsets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightBound {
    pub value: f64,
    /// Whether some subset attains the bound (guaranteed for 0 < alpha <= beta
    /// and for alpha = beta = 0; the remaining parameter range falls back to a
    /// sound but possibly loose bound).
    pub tight: bool,
}

/// Bound the weight (P+N)^alpha * cb^beta over subsets: (2*min(P,N))^alpha for
/// 0 < alpha <= beta, 1 for alpha = beta = 0, and the cb <= 1 fallback
/// (P+N)^alpha otherwise.
pub fn ub_weight(positives: usize, negatives: usize, alpha: f64, beta: f64) -> WeightBound {
    if alpha == 0.0 && beta == 0.0 {
        WeightBound {
            value: 1.0,
            tight: true,
        }
    } else if alpha > 0.0 && alpha <= beta {
        WeightBound {
            value: (2.0 * positives.min(negatives) as f64).powf(alpha),
            tight: true,
        }
    } else {
        WeightBound {
            value: metrics::pow0((positives + negatives) as f64, alpha),
            tight: false,
        }
    }
}

/// Upper bound on the relative score any subset of `s` can reach, before
/// weighting: the gap between the full-dataset value and the worst (or, for
/// overperformance search, best) subset value.
pub fn base_optimistic_estimate(
    measure: &dyn Measure,
    s: &LabeledScoreSet,
    full_value: f64,
    direction: Direction,
) -> Result<f64> {
    Ok(match (measure.kind(), direction) {
        (MeasureKind::Loss, Direction::Under) => measure.worst_subset_value(s)? - full_value,
        (MeasureKind::Score, Direction::Under) => full_value - measure.worst_subset_value(s)?,
        (MeasureKind::Loss, Direction::Over) => full_value - measure.best_subset_value(s)?,
        (MeasureKind::Score, Direction::Over) => measure.best_subset_value(s)? - full_value,
    })
}

/// Optimistic estimate for the weighted relative score of every
/// specialization: weight bound times the base estimate clamped at zero. The
/// clamp keeps the product an upper bound when the base estimate is negative;
/// no specialization can then beat a positive threshold.
pub fn optimistic_estimate(
    measure: &dyn Measure,
    s: &LabeledScoreSet,
    full_value: f64,
    alpha: f64,
    beta: f64,
    direction: Direction,
) -> Result<f64> {
    let base = base_optimistic_estimate(measure, s, full_value, direction)?;
    let bound = ub_weight(s.positives(), s.negatives(), alpha, beta);
    Ok(bound.value * base.max(0.0))
}
