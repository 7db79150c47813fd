use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;

use perfslice::dataset::{cover, generate_selectors, Dataset, SelectorTable};
use perfslice::experiments::{mean_pairwise_iou, split3};
use perfslice::measure::MeasureKind;
use perfslice::report;
use perfslice::scoring::Direction;
use perfslice::search::{mine, ResultSet};
use perfslice::stats::{correction_by_name, significance_filter, SignificanceConfig};

use super::MiningOpts;
use crate::opts::{ensure_out_dir, resolve, resolve_flag, write_file, SchemaOpts};

#[derive(Args, Debug)]
pub struct MineArgs {
    #[command(flatten)]
    pub schema: SchemaOpts,

    #[command(flatten)]
    pub mining: MiningOpts,

    /// Partition the data into train/search/validation thirds first; mining
    /// runs on the search part.
    #[arg(long)]
    pub split: bool,

    /// Filter the top-k' search results by significance on the validation
    /// part (implies --split).
    #[arg(long)]
    pub significance: bool,

    /// Search width k' used when filtering.
    #[arg(long)]
    pub kprime: Option<usize>,

    /// Randomization resamples per pattern.
    #[arg(long)]
    pub n_resamples: Option<usize>,

    /// Multiple-testing correction: by, bonferroni, or none.
    #[arg(long)]
    pub correction: Option<String>,

    /// Significance threshold on adjusted p-values.
    #[arg(long)]
    pub alpha_sig: Option<f64>,

    /// Use the (r+1)/(n+1) p-value estimate instead of r/n.
    #[arg(long)]
    pub plus_one: bool,

    /// Seed for splitting and resampling.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Output directory for report files.
    #[arg(long)]
    pub out_dir: PathBuf,
}

pub fn run(args: MineArgs) -> Result<()> {
    let (ds, resolved) = args.schema.load()?;
    let cfg_map = &resolved.config;
    let mut search_cfg = args.mining.resolve_search_config(cfg_map)?;
    let spec = search_cfg.spec;
    let final_k = search_cfg.top_k;
    let seed = resolve(args.seed, cfg_map, "seed", 0u64)?;
    let significance = resolve_flag(args.significance, cfg_map, "significance")?;
    let split = resolve_flag(args.split, cfg_map, "split")? || significance;

    let (search_ds, validation_ds) = if split {
        let (_train, search, validation) = split3(&ds, seed)?;
        (search, Some(validation))
    } else {
        (ds, None)
    };

    let selectors = generate_selectors(&search_ds, resolved.bins);
    if selectors.is_empty() {
        bail!("no selectors could be generated; all attribute columns are constant");
    }
    let table = SelectorTable::new(&search_ds, selectors);

    let sig_cfg = if significance {
        let k_prime = resolve(args.kprime, cfg_map, "kprime", 100usize)?;
        if final_k > k_prime {
            bail!("--top-k must not exceed --kprime when filtering");
        }
        search_cfg.top_k = k_prime;
        Some(SignificanceConfig {
            n_resamples: resolve(args.n_resamples, cfg_map, "n_resamples", 1000usize)?,
            correction: correction_by_name(&resolve(
                args.correction.clone(),
                cfg_map,
                "correction",
                "by".to_string(),
            )?)?,
            alpha: resolve(args.alpha_sig, cfg_map, "alpha_sig", 0.05)?,
            k_prime,
            k: final_k,
            seed,
            plus_one: resolve_flag(args.plus_one, cfg_map, "plus_one")?,
        })
    } else {
        None
    };

    let mined = mine(&search_ds, &table, &search_cfg).context("search failed")?;
    eprintln!(
        "search: {} entries, {} evaluated, {} pruned, {:.3}s",
        mined.entries.len(),
        mined.stats.evaluated,
        mined.stats.pruned,
        mined.stats.wall.as_secs_f64()
    );

    ensure_out_dir(&args.out_dir)?;

    let (final_rs, sig_report) = match (&sig_cfg, &validation_ds) {
        (Some(sig_cfg), Some(validation)) => {
            let validation_table = table.rebind(validation);
            let (filtered, report) =
                significance_filter(&mined, validation, &validation_table, &spec, sig_cfg)?;
            (filtered, Some(report))
        }
        _ => (mined, None),
    };

    let mut csv_out = Vec::new();
    report::result_set_csv(&mut csv_out, &final_rs, &table, &search_ds)?;
    write_file(&args.out_dir, "results.csv", &csv_out)?;
    write_file(
        &args.out_dir,
        "results.json",
        report::result_set_json(&final_rs, &table, &search_ds).as_bytes(),
    )?;
    if let Some(rep) = &sig_report {
        let mut sig_csv = Vec::new();
        report::significance_csv(&mut sig_csv, rep, &table, &search_ds)?;
        write_file(&args.out_dir, "significance.csv", &sig_csv)?;
        write_file(
            &args.out_dir,
            "significance.json",
            report::significance_json(rep, &table, &search_ds).as_bytes(),
        )?;
    }

    let mut params = vec![
        ("measure".to_string(), spec.measure.name().to_string()),
        ("alpha".to_string(), format!("{}", spec.alpha)),
        ("beta".to_string(), format!("{}", spec.beta)),
        (
            "gen_aware".to_string(),
            format!("{}", spec.generalization_aware),
        ),
        ("direction".to_string(), spec.direction.name().to_string()),
        ("top_k".to_string(), format!("{final_k}")),
        ("depth".to_string(), format!("{}", search_cfg.max_depth)),
        ("min_size".to_string(), format!("{}", search_cfg.min_cover)),
        ("pruning".to_string(), format!("{}", search_cfg.pruning)),
        ("order".to_string(), search_cfg.order.name().to_string()),
        ("bins".to_string(), format!("{}", resolved.bins)),
        ("seed".to_string(), format!("{seed}")),
        ("split".to_string(), format!("{split}")),
        ("significance".to_string(), format!("{significance}")),
        ("search_rows".to_string(), format!("{}", search_ds.len())),
    ];
    if let Some(sig) = &sig_cfg {
        params.push(("kprime".to_string(), format!("{}", sig.k_prime)));
        params.push(("n_resamples".to_string(), format!("{}", sig.n_resamples)));
        params.push(("correction".to_string(), sig.correction.name().to_string()));
        params.push(("alpha_sig".to_string(), format!("{}", sig.alpha)));
    }
    write_file(
        &args.out_dir,
        "manifest.json",
        report::manifest_json("mine", &params).as_bytes(),
    )?;

    print_summary(&final_rs, &spec, &table, &search_ds, sig_report.as_ref());
    Ok(())
}

fn print_summary(
    rs: &ResultSet,
    spec: &perfslice::scoring::ScoringSpec,
    table: &SelectorTable,
    ds: &Dataset,
    sig: Option<&perfslice::stats::SignificanceReport>,
) {
    println!(
        "measure={} alpha={} beta={} gen_aware={} direction={}",
        spec.measure.name(),
        spec.alpha,
        spec.beta,
        spec.generalization_aware,
        spec.direction.name()
    );
    println!("results: {}", rs.entries.len());
    if rs.entries.is_empty() {
        if let Some(rep) = sig {
            println!(
                "filtered/significant/k': {}/{}/{}",
                rep.filtered, rep.significant, rep.tested
            );
        }
        return;
    }
    let n = rs.entries.len() as f64;
    let mean_cover: f64 = rs
        .entries
        .iter()
        .map(|e| e.diagnostics.cover_size as f64)
        .sum::<f64>()
        / n;
    let mean_ncr: f64 = rs.entries.iter().map(|e| e.diagnostics.ncr).sum::<f64>() / n;

    // Mean exceptionality: the unweighted relative score of each cover.
    let full_value = spec
        .measure
        .evaluate(&ds.full_set())
        .expect("measure defined on the search split");
    let mean_exceptionality: f64 = rs
        .entries
        .iter()
        .filter_map(|e| {
            let v = match spec.measure.name() {
                "arl" => e.diagnostics.arl,
                "pr_auc" => e.diagnostics.pr_auc,
                _ => e.diagnostics.roc_auc,
            }?;
            let rel = match spec.measure.kind() {
                MeasureKind::Loss => v - full_value,
                MeasureKind::Score => full_value - v,
            };
            Some(match spec.direction {
                Direction::Under => rel,
                Direction::Over => -rel,
            })
        })
        .sum::<f64>()
        / n;

    let covers: Vec<_> = rs
        .entries
        .iter()
        .map(|e| cover(&e.pattern, table))
        .collect();
    let iou = mean_pairwise_iou(&covers)
        .map(|v| format!("{v:.4}"))
        .unwrap_or_else(|| "-".to_string());

    println!(
        "mean cover: {mean_cover:.1}  mean NCR: {mean_ncr:.4}  mean exceptionality: {mean_exceptionality:.4}  mean pairwise IoU: {iou}"
    );
    if let Some(rep) = sig {
        println!(
            "filtered/significant/k': {}/{}/{}",
            rep.filtered, rep.significant, rep.tested
        );
    }
}
