use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;

use perfslice::experiments::{
    inject_into_dataset, run_injection_experiment, synth_injection_dataset, InjectionSetup,
};
use perfslice::report;
use perfslice::scoring::ScoringSpec;

use super::MiningOpts;
use crate::opts::{ensure_out_dir, parse_f64_list, resolve, write_file, SchemaOpts};

#[derive(Args, Debug)]
pub struct InjectArgs {
    /// Generate a synthetic benchmark dataset with this many rows instead of
    /// reading --input.
    #[arg(long)]
    pub synth: Option<usize>,

    #[command(flatten)]
    pub schema: SchemaOpts,

    #[command(flatten)]
    pub mining: MiningOpts,

    /// Maximum pattern length of the injected subgroup.
    #[arg(long)]
    pub len_max: Option<usize>,

    /// Lower cover-size fraction of injection candidates.
    #[arg(long)]
    pub frac_lo: Option<f64>,

    /// Upper cover-size fraction of injection candidates.
    #[arg(long)]
    pub frac_hi: Option<f64>,

    /// Candidates must reach this ROC AUC before injection.
    #[arg(long)]
    pub min_pre_auc: Option<f64>,

    /// Comma-separated alpha=beta weightings for the gen-aware runs.
    #[arg(long, default_value = "0,0.3")]
    pub weights: String,

    /// Seed controlling generation, candidate choice, and ties.
    #[arg(long)]
    pub seed: u64,

    /// Output directory for report files.
    #[arg(long)]
    pub out_dir: PathBuf,
}

pub fn run(args: InjectArgs) -> Result<()> {
    let cfg_map = args.schema.config_map()?;
    let bins = resolve(args.schema.bins, &cfg_map, "bins", 5usize)?;
    let setup = InjectionSetup {
        n: args.synth.unwrap_or(3000),
        seed: args.seed,
        bins,
        len_max: resolve(args.len_max, &cfg_map, "len_max", 3usize)?,
        frac_lo: resolve(args.frac_lo, &cfg_map, "frac_lo", 0.004)?,
        frac_hi: resolve(args.frac_hi, &cfg_map, "frac_hi", 0.006)?,
        min_pre_auc: resolve(args.min_pre_auc, &cfg_map, "min_pre_auc", 0.9)?,
        ..Default::default()
    };

    let injected = if let Some(n) = args.synth {
        if args.schema.input.is_some() {
            bail!("--synth and --input are mutually exclusive");
        }
        let clean = synth_injection_dataset(n, args.seed);
        inject_into_dataset(&clean, &setup)?
    } else if args.schema.input.is_some() {
        let (clean, _) = args.schema.load()?;
        inject_into_dataset(&clean, &setup)?
    } else {
        bail!("one of --synth or --input is required");
    };

    let weights = parse_f64_list(&args.weights)?;
    let measure = args.mining.resolve_measure(&cfg_map)?;
    let mut base = args.mining.resolve_search_config(&cfg_map)?;
    // Injection benchmark defaults differ from mine: wide result window and a
    // minimum size below the injected cover.
    if args.mining.top_k.is_none() && !cfg_map.contains_key("top_k") {
        base.top_k = 10;
    }
    if args.mining.min_size.is_none() && !cfg_map.contains_key("min_size") {
        base.min_cover = 10;
    }

    let mut configs = Vec::new();
    let mut baseline = base;
    baseline.spec = ScoringSpec::new(measure, 0.0, 0.0).direction(base.spec.direction);
    configs.push(("baseline".to_string(), baseline));
    for &w in &weights {
        let mut cfg = base;
        cfg.spec = ScoringSpec::new(measure, w, w)
            .gen_aware(true)
            .direction(base.spec.direction);
        configs.push((format!("gen_aware_w{w}"), cfg));
    }

    let runs = run_injection_experiment(&injected, &configs)?;

    ensure_out_dir(&args.out_dir)?;
    let mut ds_csv = Vec::new();
    injected.dataset.write_csv(&mut ds_csv)?;
    write_file(&args.out_dir, "injected.csv", &ds_csv)?;

    let pattern_doc = serde_json::json!({
        "pattern": injected.pattern.render(&injected.table, &injected.dataset),
        "selector_ids": injected.pattern.ids(),
        "cover_size": injected.cover.count_ones(),
        "pre_roc_auc": injected.pre_roc_auc,
        "post_roc_auc": injected.post_roc_auc,
    });
    write_file(
        &args.out_dir,
        "injected_pattern.json",
        serde_json::to_string_pretty(&pattern_doc)?.as_bytes(),
    )?;

    let mut ious_csv = Vec::new();
    report::injection_csv(&mut ious_csv, &runs, &injected.table, &injected.dataset)?;
    write_file(&args.out_dir, "ious.csv", &ious_csv)?;

    let params = vec![
        (
            "source".to_string(),
            if args.synth.is_some() {
                "synth".into()
            } else {
                "input".into()
            },
        ),
        ("n".to_string(), format!("{}", injected.dataset.len())),
        ("seed".to_string(), format!("{}", args.seed)),
        ("bins".to_string(), format!("{bins}")),
        ("len_max".to_string(), format!("{}", setup.len_max)),
        ("frac_lo".to_string(), format!("{}", setup.frac_lo)),
        ("frac_hi".to_string(), format!("{}", setup.frac_hi)),
        ("min_pre_auc".to_string(), format!("{}", setup.min_pre_auc)),
        ("measure".to_string(), measure.name().to_string()),
        ("weights".to_string(), args.weights.clone()),
        ("top_k".to_string(), format!("{}", base.top_k)),
        ("depth".to_string(), format!("{}", base.max_depth)),
        ("min_size".to_string(), format!("{}", base.min_cover)),
    ];
    write_file(
        &args.out_dir,
        "manifest.json",
        report::manifest_json("inject", &params).as_bytes(),
    )?;

    println!(
        "injected pattern: {} (cover {}, ROC AUC {:.4} -> {:.4})",
        injected.pattern.render(&injected.table, &injected.dataset),
        injected.cover.count_ones(),
        injected.pre_roc_auc,
        injected.post_roc_auc
    );
    for run in &runs {
        let best = run.ious.iter().cloned().fold(0.0f64, f64::max);
        println!(
            "{}: best IoU {:.4} over top-{}",
            run.label,
            best,
            run.results.entries.len()
        );
    }
    Ok(())
}
