//! Rank-based performance kernels on labeled score multisets.
//!
//! All kernels treat the input as a multiset of (label, score) pairs: order
//! never matters, duplicates do. Threshold semantics are strictly-greater-than
//! with thresholds drawn from the unique observed scores plus -inf, so ROC AUC
//! matches pair counting with ties worth 1/2 exactly.

use crate::error::{Error, Result};

/// A multiset of binary labels and real-valued prediction scores.
///
/// Construction validates labels in {0,1} and finite scores, and caches a
/// score-descending traversal order so every kernel runs in one linear sweep.
#[derive(Debug, Clone)]
pub struct LabeledScoreSet {
    labels: Vec<u8>,
    scores: Vec<f64>,
    positives: usize,
    order: Vec<u32>,
}

impl LabeledScoreSet {
    pub fn new(labels: Vec<u8>, scores: Vec<f64>) -> Result<Self> {
        if labels.len() != scores.len() {
            return Err(Error::LengthMismatch(format!(
                "{} labels vs {} scores",
                labels.len(),
                scores.len()
            )));
        }
        let mut positives = 0usize;
        for (i, &y) in labels.iter().enumerate() {
            if y > 1 {
                return Err(Error::InvalidLabel {
                    index: i,
                    value: y as f64,
                });
            }
            positives += y as usize;
        }
        for (i, &s) in scores.iter().enumerate() {
            if !s.is_finite() {
                return Err(Error::NonFiniteScore(i));
            }
        }
        let mut order: Vec<u32> = (0..labels.len() as u32).collect();
        order.sort_unstable_by(|&a, &b| {
            scores[b as usize]
                .total_cmp(&scores[a as usize])
                .then(a.cmp(&b))
        });
        Ok(LabeledScoreSet {
            labels,
            scores,
            positives,
            order,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.positives
    }

    pub fn negatives(&self) -> usize {
        self.labels.len() - self.positives
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    /// (positive count, negative count) per tied score group, descending score.
    pub(crate) fn tie_groups(&self) -> Vec<(u64, u64)> {
        let mut groups = Vec::new();
        let mut i = 0;
        while i < self.order.len() {
            let s = self.scores[self.order[i] as usize];
            let mut pos = 0u64;
            let mut neg = 0u64;
            while i < self.order.len() && self.scores[self.order[i] as usize] == s {
                if self.labels[self.order[i] as usize] == 1 {
                    pos += 1;
                } else {
                    neg += 1;
                }
                i += 1;
            }
            groups.push((pos, neg));
        }
        groups
    }

    /// Score of the lowest-ranked positive, if any.
    pub(crate) fn min_positive_score(&self) -> Option<f64> {
        self.order
            .iter()
            .rev()
            .find(|&&i| self.labels[i as usize] == 1)
            .map(|&i| self.scores[i as usize])
    }

    pub(crate) fn max_positive_score(&self) -> Option<f64> {
        self.order
            .iter()
            .find(|&&i| self.labels[i as usize] == 1)
            .map(|&i| self.scores[i as usize])
    }

    pub(crate) fn min_negative_score(&self) -> Option<f64> {
        self.order
            .iter()
            .rev()
            .find(|&&i| self.labels[i as usize] == 0)
            .map(|&i| self.scores[i as usize])
    }

    pub(crate) fn max_negative_score(&self) -> Option<f64> {
        self.order
            .iter()
            .find(|&&i| self.labels[i as usize] == 0)
            .map(|&i| self.scores[i as usize])
    }
}

fn undefined(measure: &'static str, reason: &'static str) -> Error {
    Error::UndefinedMeasure { measure, reason }
}

/// Ranking penalty of the positive instance at index `i`: the number of
/// negatives scored strictly above it plus half the negatives tied with it.
pub fn pen(i: usize, s: &LabeledScoreSet) -> f64 {
    assert_eq!(s.labels()[i], 1, "pen requires a positive instance");
    let si = s.scores()[i];
    let mut above = 0u64;
    let mut tied = 0u64;
    for (&y, &sc) in s.labels().iter().zip(s.scores()) {
        if y == 0 {
            if sc > si {
                above += 1;
            } else if sc == si {
                tied += 1;
            }
        }
    }
    above as f64 + tied as f64 / 2.0
}

/// Average ranking loss: mean of `pen` over all positive instances.
pub fn arl(s: &LabeledScoreSet) -> Result<f64> {
    if s.positives() == 0 {
        return Err(undefined("arl", "no positive instance"));
    }
    // Accumulate doubled penalties so the sum stays an exact integer.
    let mut neg_above = 0u64;
    let mut doubled: u128 = 0;
    for (pos, neg) in s.tie_groups() {
        doubled += pos as u128 * (2 * neg_above + neg) as u128;
        neg_above += neg;
    }
    Ok(doubled as f64 / (2.0 * s.positives() as f64))
}

/// Trapezoidal ROC AUC over supporting points at thresholds
/// {unique scores} ∪ {-inf}. The numerator is accumulated in integer
/// arithmetic, so the result equals pair counting (ties 1/2) bit for bit.
pub fn roc_auc(s: &LabeledScoreSet) -> Result<f64> {
    let p = s.positives() as u64;
    let n = s.negatives() as u64;
    if p == 0 || n == 0 {
        return Err(undefined("roc_auc", "needs both classes"));
    }
    let mut tp = 0u64;
    let mut fp = 0u64;
    let mut doubled_area: u128 = 0;
    for (gp, gn) in s.tie_groups() {
        doubled_area += gn as u128 * (2 * tp + gp) as u128;
        tp += gp;
        fp += gn;
    }
    debug_assert_eq!((tp, fp), (p, n));
    Ok(doubled_area as f64 / (2.0 * p as f64 * n as f64))
}

/// Area under the linearly interpolated PR curve over the same supporting
/// points as `roc_auc`, width |ΔTP|/P per trapezoid. Precision at TP+FP=0 is
/// defined as 1.
pub fn pr_auc(s: &LabeledScoreSet) -> Result<f64> {
    let p = s.positives() as u64;
    if p == 0 {
        return Err(undefined("pr_auc", "no positive instance"));
    }
    let mut tp = 0u64;
    let mut fp = 0u64;
    let mut prev_prec = 1.0f64;
    // Kahan-compensated accumulation of the doubled trapezoid sum.
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for (gp, gn) in s.tie_groups() {
        let tp2 = tp + gp;
        let fp2 = fp + gn;
        let prec = if tp2 + fp2 == 0 {
            1.0
        } else {
            tp2 as f64 / (tp2 + fp2) as f64
        };
        let term = gp as f64 * (prec + prev_prec);
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        tp = tp2;
        fp = fp2;
        prev_prec = prec;
    }
    Ok(sum / (2.0 * p as f64))
}

/// Class balance factor: min(N/P, P/N), or 0 when only one class occurs.
pub fn class_balance(s: &LabeledScoreSet) -> f64 {
    let p = s.positives() as f64;
    let n = s.negatives() as f64;
    if p == 0.0 || n == 0.0 {
        0.0
    } else {
        (n / p).min(p / n)
    }
}

/// Combined cover-size and class-balance weight (P+N)^alpha * cb^beta,
/// with the convention 0^0 = 1.
pub fn weight(s: &LabeledScoreSet, alpha: f64, beta: f64) -> f64 {
    pow0(s.len() as f64, alpha) * pow0(class_balance(s), beta)
}

/// base^exp with 0^0 defined as 1.
pub(crate) fn pow0(base: f64, exp: f64) -> f64 {
    if exp == 0.0 {
        1.0
    } else {
        base.powf(exp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn set(pairs: &[(u8, f64)]) -> LabeledScoreSet {
        let labels = pairs.iter().map(|p| p.0).collect();
        let scores = pairs.iter().map(|p| p.1).collect();
        LabeledScoreSet::new(labels, scores).unwrap()
    }

    #[test]
    fn pen_counts_negatives_above() {
        let s = set(&[(1, 0.9), (0, 0.8), (1, 0.3), (0, 0.7)]);
        assert_eq!(pen(2, &s), 2.0);
        assert_eq!(pen(0, &s), 0.0);
    }

    #[test]
    fn pen_counts_ties_as_half() {
        let s = set(&[(1, 0.5), (0, 0.5)]);
        assert_eq!(pen(0, &s), 0.5);
    }

    #[test]
    fn arl_examples() {
        let s = set(&[(1, 0.9), (0, 0.8), (1, 0.3), (0, 0.7)]);
        assert_eq!(arl(&s).unwrap(), 1.0);

        let separated = set(&[(1, 0.9), (1, 0.8), (0, 0.2), (0, 0.1)]);
        assert_eq!(arl(&separated).unwrap(), 0.0);

        let inverted = set(&[(1, 0.3), (0, 0.7)]);
        assert_eq!(arl(&inverted).unwrap(), 1.0);
    }

    #[test]
    fn arl_undefined_without_positives() {
        let s = set(&[(0, 0.4), (0, 0.2)]);
        assert!(matches!(arl(&s), Err(Error::UndefinedMeasure { .. })));
    }

    #[test]
    fn roc_auc_examples() {
        assert_eq!(roc_auc(&set(&[(1, 0.9), (0, 0.1)])).unwrap(), 1.0);
        assert_eq!(roc_auc(&set(&[(1, 0.5), (0, 0.5)])).unwrap(), 0.5);
        assert_eq!(
            roc_auc(&set(&[(1, 0.8), (0, 0.7), (1, 0.6), (0, 0.4)])).unwrap(),
            0.75
        );
    }

    #[test]
    fn roc_auc_undefined_on_single_class() {
        assert!(roc_auc(&set(&[(1, 0.9), (1, 0.1)])).is_err());
        assert!(roc_auc(&set(&[(0, 0.9), (0, 0.1)])).is_err());
    }

    #[test]
    fn pr_auc_examples() {
        assert_eq!(pr_auc(&set(&[(1, 0.9), (1, 0.8), (0, 0.1)])).unwrap(), 1.0);
        assert_eq!(pr_auc(&set(&[(1, 0.9), (1, 0.1)])).unwrap(), 1.0);
        let v = pr_auc(&set(&[(1, 0.8), (0, 0.7), (1, 0.6), (0, 0.4)])).unwrap();
        assert!((v - 19.0 / 24.0).abs() < 1e-15, "got {v}");
    }

    #[test]
    fn class_balance_examples() {
        assert_eq!(
            class_balance(&set(&[(1, 0.1), (1, 0.2), (0, 0.3), (0, 0.4)])),
            1.0
        );
        let s = set(&[(1, 0.1), (1, 0.2), (1, 0.3), (0, 0.4)]);
        assert!((class_balance(&s) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(class_balance(&set(&[(0, 0.1), (0, 0.2)])), 0.0);
    }

    #[test]
    fn weight_examples() {
        let s = set(&[(1, 0.1), (1, 0.2), (1, 0.3), (0, 0.4), (0, 0.5), (0, 0.6)]);
        assert_eq!(weight(&s, 0.0, 0.0), 1.0);
        assert_eq!(weight(&s, 1.0, 1.0), 6.0);

        let skewed = set(&[
            (1, 0.1),
            (1, 0.2),
            (1, 0.3),
            (0, 0.4),
            (0, 0.5),
            (0, 0.6),
            (0, 0.7),
            (0, 0.8),
        ]);
        assert!((weight(&skewed, 1.0, 1.0) - 4.8).abs() < 1e-12);
    }

    #[test]
    fn weight_zero_conventions() {
        let single = set(&[(0, 0.1)]);
        assert_eq!(weight(&single, 0.0, 0.0), 1.0);
        assert_eq!(weight(&single, 1.0, 0.0), 1.0);
        assert_eq!(weight(&single, 0.0, 1.0), 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(LabeledScoreSet::new(vec![2], vec![0.1]).is_err());
        assert!(LabeledScoreSet::new(vec![1], vec![f64::NAN]).is_err());
        assert!(LabeledScoreSet::new(vec![1, 0], vec![0.1]).is_err());
    }
}
