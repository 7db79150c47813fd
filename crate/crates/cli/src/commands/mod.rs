pub mod bench;
pub mod inject;
pub mod mine;
pub mod skew;

use anyhow::Result;
use clap::Args;
use perfslice::measure::{self, Measure};
use perfslice::scoring::{Direction, ScoringSpec};
use perfslice::search::{SearchConfig, SearchOrder};

use crate::opts::{resolve, resolve_flag, resolve_opt};
use std::collections::BTreeMap;

/// Mining parameters shared by subcommands that search.
#[derive(Args, Debug, Clone)]
pub struct MiningOpts {
    /// Performance measure: arl, roc_auc, or pr_auc.
    #[arg(long)]
    pub measure: Option<String>,

    /// Cover-size weight exponent.
    #[arg(long)]
    pub alpha: Option<f64>,

    /// Class-balance weight exponent.
    #[arg(long)]
    pub beta: Option<f64>,

    /// Subtract each pattern's best generalization score.
    #[arg(long)]
    pub gen_aware: bool,

    /// Search direction: under (default) or over.
    #[arg(long)]
    pub direction: Option<String>,

    /// Final result size.
    #[arg(long)]
    pub top_k: Option<usize>,

    /// Maximum pattern length.
    #[arg(long)]
    pub depth: Option<usize>,

    /// Minimum subgroup cover size.
    #[arg(long)]
    pub min_size: Option<usize>,

    /// Disable optimistic-estimate pruning.
    #[arg(long)]
    pub no_pruning: bool,

    /// Enumeration strategy: best_first (default) or dfs.
    #[arg(long)]
    pub order: Option<String>,
}

impl MiningOpts {
    pub fn resolve_measure(&self, cfg: &BTreeMap<String, String>) -> Result<&'static dyn Measure> {
        let name = resolve(self.measure.clone(), cfg, "measure", "roc_auc".to_string())?;
        Ok(measure::by_name(&name)?)
    }

    pub fn resolve_spec(&self, cfg: &BTreeMap<String, String>) -> Result<ScoringSpec> {
        let m = self.resolve_measure(cfg)?;
        let alpha = resolve(self.alpha, cfg, "alpha", 0.0)?;
        let beta = resolve(self.beta, cfg, "beta", 0.0)?;
        if !(alpha.is_finite() && alpha >= 0.0 && beta.is_finite() && beta >= 0.0) {
            anyhow::bail!("--alpha and --beta must be finite and non-negative");
        }
        let gen_aware = resolve_flag(self.gen_aware, cfg, "gen_aware")?;
        let direction =
            match resolve(self.direction.clone(), cfg, "direction", "under".into())?.as_str() {
                "under" => Direction::Under,
                "over" => Direction::Over,
                other => anyhow::bail!("unknown direction {other:?} (expected under or over)"),
            };
        Ok(ScoringSpec::new(m, alpha, beta)
            .gen_aware(gen_aware)
            .direction(direction))
    }

    pub fn resolve_search_config(&self, cfg: &BTreeMap<String, String>) -> Result<SearchConfig> {
        let spec = self.resolve_spec(cfg)?;
        let mut sc = SearchConfig::new(spec);
        sc.top_k = resolve(self.top_k, cfg, "top_k", 5)?;
        sc.max_depth = resolve(self.depth, cfg, "depth", 4)?;
        sc.min_cover = resolve(self.min_size, cfg, "min_size", 20)?;
        sc.pruning = !resolve_flag(self.no_pruning, cfg, "no_pruning")?;
        let order = resolve_opt(self.order.clone(), cfg, "order")?;
        if let Some(order) = order {
            sc.order = SearchOrder::by_name(&order)?;
        }
        Ok(sc)
    }
}
