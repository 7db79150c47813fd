//! Subgroup discovery on soft-classifier ranking performance.
//!
//! Given a tabular dataset with binary ground-truth labels and real-valued
//! prediction scores, this crate finds interpretable subgroups (conjunctions
//! of attribute selectors) on which the classifier's ranking performance
//! deviates most from the whole dataset. Performance is measured by average
//! ranking loss, ROC AUC, or linear PR AUC; exhaustive top-k search is
//! accelerated by tight optimistic estimates, and mined subgroups can be
//! filtered by stratified randomization tests on a holdout split.

pub mod bitset;
pub mod bounds;
pub mod config;
pub mod dataset;
pub mod error;
pub mod experiments;
pub mod measure;
pub mod metrics;
pub mod report;
pub mod scoring;
pub mod search;
pub mod stats;

pub use error::{Error, Result};
