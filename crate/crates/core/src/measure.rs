//! Performance measures behind a common trait, registered by name.
//!
//! Each measure bundles its kernel, its definedness constraint, and the
//! extremal subset values that drive optimistic-estimate pruning. Search,
//! scoring, and significance code only talk to `&dyn Measure`, so adding a
//! measure means one impl block plus a registry entry.

use std::collections::BTreeMap;
use std::sync::LazyLock;

use crate::error::Result;
use crate::metrics::{self, LabeledScoreSet};

/// Whether larger values of the measure indicate worse (loss) or better
/// (score) model performance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    Loss,
    Score,
}

pub trait Measure: Send + Sync {
    fn name(&self) -> &'static str;

    fn kind(&self) -> MeasureKind;

    /// Definedness constraint on an input multiset.
    fn is_defined(&self, s: &LabeledScoreSet) -> bool;

    fn evaluate(&self, s: &LabeledScoreSet) -> Result<f64>;

    /// Extremal value of the measure over all subsets in the *worst* direction
    /// (maximum for a loss, minimum for a score). Tight: some subset attains it.
    fn worst_subset_value(&self, s: &LabeledScoreSet) -> Result<f64>;

    /// Extremal value over all subsets in the *best* direction (minimum for a
    /// loss, maximum for a score). Used when searching for overperformance.
    fn best_subset_value(&self, s: &LabeledScoreSet) -> Result<f64>;
}

/// Average ranking loss.
pub struct Arl;

impl Measure for Arl {
    fn name(&self) -> &'static str {
        "arl"
    }

    fn kind(&self) -> MeasureKind {
        MeasureKind::Loss
    }

    fn is_defined(&self, s: &LabeledScoreSet) -> bool {
        s.positives() >= 1
    }

    fn evaluate(&self, s: &LabeledScoreSet) -> Result<f64> {
        metrics::arl(s)
    }

    fn worst_subset_value(&self, s: &LabeledScoreSet) -> Result<f64> {
        crate::bounds::max_pen(s)
    }

    fn best_subset_value(&self, s: &LabeledScoreSet) -> Result<f64> {
        // Any single positive on its own has ARL 0.
        if s.positives() == 0 {
            metrics::arl(s)?;
        }
        Ok(0.0)
    }
}

/// Area under the ROC curve.
pub struct RocAuc;

impl Measure for RocAuc {
    fn name(&self) -> &'static str {
        "roc_auc"
    }

    fn kind(&self) -> MeasureKind {
        MeasureKind::Score
    }

    fn is_defined(&self, s: &LabeledScoreSet) -> bool {
        s.positives() >= 1 && s.negatives() >= 1
    }

    fn evaluate(&self, s: &LabeledScoreSet) -> Result<f64> {
        metrics::roc_auc(s)
    }

    fn worst_subset_value(&self, s: &LabeledScoreSet) -> Result<f64> {
        crate::bounds::lb_roc_auc(s)
    }

    fn best_subset_value(&self, s: &LabeledScoreSet) -> Result<f64> {
        crate::bounds::ub_roc_auc(s)
    }
}

/// Area under the linearly interpolated PR curve.
pub struct PrAuc;

impl Measure for PrAuc {
    fn name(&self) -> &'static str {
        "pr_auc"
    }

    fn kind(&self) -> MeasureKind {
        MeasureKind::Score
    }

    fn is_defined(&self, s: &LabeledScoreSet) -> bool {
        s.positives() >= 1
    }

    fn evaluate(&self, s: &LabeledScoreSet) -> Result<f64> {
        metrics::pr_auc(s)
    }

    fn worst_subset_value(&self, s: &LabeledScoreSet) -> Result<f64> {
        crate::bounds::lb_pr_auc(s)
    }

    fn best_subset_value(&self, s: &LabeledScoreSet) -> Result<f64> {
        // Any single positive on its own has PR AUC 1.
        if s.positives() == 0 {
            metrics::pr_auc(s)?;
        }
        Ok(1.0)
    }
}

static REGISTRY: LazyLock<BTreeMap<&'static str, &'static dyn Measure>> = LazyLock::new(|| {
    let mut m: BTreeMap<&'static str, &'static dyn Measure> = BTreeMap::new();
    for measure in [&Arl as &'static dyn Measure, &RocAuc, &PrAuc] {
        m.insert(measure.name(), measure);
    }
    m
});

/// Look up a registered measure by name.
pub fn by_name(name: &str) -> Result<&'static dyn Measure> {
    REGISTRY
        .get(name)
        .copied()
        .ok_or_else(|| crate::error::Error::UnknownMeasure(name.to_string()))
}

/// Registered measure names, sorted.
pub fn names() -> Vec<&'static str> {
    REGISTRY.keys().copied().collect()
}
