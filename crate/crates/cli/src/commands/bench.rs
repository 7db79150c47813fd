use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;

use perfslice::dataset::{generate_selectors, SelectorTable};
use perfslice::experiments::{
    bench_pruning, inject_into_dataset, synth_injection_dataset, InjectionSetup,
};
use perfslice::measure::{self, Measure};
use perfslice::report;

use super::MiningOpts;
use crate::opts::{ensure_out_dir, parse_f64_list, resolve, write_file, SchemaOpts};

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Generate a synthetic benchmark dataset with this many rows instead of
    /// reading --input.
    #[arg(long)]
    pub synth: Option<usize>,

    /// Inject an underperforming subgroup first (synthetic data only), giving
    /// the search structure to prune against.
    #[arg(long)]
    pub inject: bool,

    #[command(flatten)]
    pub schema: SchemaOpts,

    #[command(flatten)]
    pub mining: MiningOpts,

    /// Comma-separated measures to benchmark.
    #[arg(long, default_value = "arl,roc_auc,pr_auc")]
    pub measures: String,

    /// Comma-separated alpha=beta weightings.
    #[arg(long, default_value = "0,0.1,0.3,1")]
    pub weights: String,

    /// Paired runs per cell; medians are reported.
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,

    /// Seed for synthetic data generation.
    #[arg(long)]
    pub seed: u64,

    /// Output directory for report files.
    #[arg(long)]
    pub out_dir: PathBuf,
}

pub fn run(args: BenchArgs) -> Result<()> {
    let cfg_map = args.schema.config_map()?;
    let bins = resolve(args.schema.bins, &cfg_map, "bins", 5usize)?;

    let ds = if let Some(n) = args.synth {
        if args.schema.input.is_some() {
            bail!("--synth and --input are mutually exclusive");
        }
        let clean = synth_injection_dataset(n, args.seed);
        if args.inject {
            let setup = InjectionSetup {
                n,
                seed: args.seed,
                bins,
                ..Default::default()
            };
            inject_into_dataset(&clean, &setup)?.dataset
        } else {
            clean
        }
    } else if args.schema.input.is_some() {
        if args.inject {
            bail!("--inject applies to --synth data only");
        }
        args.schema.load()?.0
    } else {
        bail!("one of --synth or --input is required");
    };

    let table = SelectorTable::new(&ds, generate_selectors(&ds, bins));
    let measures: Vec<&'static dyn Measure> = args
        .measures
        .split(',')
        .map(|name| measure::by_name(name.trim()).map_err(anyhow::Error::from))
        .collect::<Result<_>>()?;
    let weights = parse_f64_list(&args.weights)?;

    let mut base = args.mining.resolve_search_config(&cfg_map)?;
    if args.mining.depth.is_none() && !cfg_map.contains_key("depth") {
        base.max_depth = 3;
    }

    let rows = bench_pruning(&ds, &table, &measures, &weights, args.repeats, &base)?;

    // Timings go to stderr; the report file keeps only reproducible columns.
    eprintln!("measure weight pruned_s unpruned_s speedup nodes_pruned nodes_unpruned equal");
    for r in &rows {
        eprintln!(
            "{} {} {:.4} {:.4} {:.1} {} {} {}",
            r.measure,
            r.weight,
            r.median_secs_pruned,
            r.median_secs_unpruned,
            r.speedup,
            r.evaluated_pruned,
            r.evaluated_unpruned,
            r.identical_results
        );
    }
    if rows.iter().any(|r| !r.identical_results) {
        bail!("pruned and unpruned searches disagreed");
    }

    ensure_out_dir(&args.out_dir)?;
    let mut csv = Vec::new();
    report::bench_csv_deterministic(&mut csv, &rows)?;
    write_file(&args.out_dir, "bench.csv", &csv)?;

    let params = vec![
        (
            "source".to_string(),
            if args.synth.is_some() {
                "synth".into()
            } else {
                "input".into()
            },
        ),
        ("n".to_string(), format!("{}", ds.len())),
        ("inject".to_string(), format!("{}", args.inject)),
        ("measures".to_string(), args.measures.clone()),
        ("weights".to_string(), args.weights.clone()),
        ("repeats".to_string(), format!("{}", args.repeats)),
        ("depth".to_string(), format!("{}", base.max_depth)),
        ("min_size".to_string(), format!("{}", base.min_cover)),
        ("top_k".to_string(), format!("{}", base.top_k)),
        ("bins".to_string(), format!("{bins}")),
        ("seed".to_string(), format!("{}", args.seed)),
    ];
    write_file(
        &args.out_dir,
        "manifest.json",
        report::manifest_json("bench", &params).as_bytes(),
    )?;

    println!("bench: {} cells written", rows.len());
    Ok(())
}
