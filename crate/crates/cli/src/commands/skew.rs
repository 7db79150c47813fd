use std::path::PathBuf;

use anyhow::Result;
use clap::Args;

use perfslice::experiments::{skew_surface, SkewAxis, SkewSurfaceSpec};
use perfslice::measure;
use perfslice::report;

use crate::opts::{ensure_out_dir, parse_f64_list, write_file};

#[derive(Args, Debug)]
pub struct SkewArgs {
    /// Performance measure: arl, roc_auc, or pr_auc.
    #[arg(long, default_value = "roc_auc")]
    pub measure: String,

    /// Grid axis: cover_size or ncr.
    #[arg(long, default_value = "cover_size")]
    pub axis: String,

    /// Comma-separated correlations in [-1, 1].
    #[arg(long, default_value = "-1,-0.5,0,0.5,1", allow_hyphen_values = true)]
    pub corrs: String,

    /// Comma-separated axis values (sizes, or negative class ratios).
    #[arg(long, default_value = "20,50,100,200,500")]
    pub values: String,

    /// Independent draws per grid cell.
    #[arg(long, default_value_t = 20)]
    pub repeats: usize,

    /// Cover-size weight exponent applied to the sampled cell.
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,

    /// Class-balance weight exponent applied to the sampled cell.
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,

    /// Seed controlling all draws.
    #[arg(long)]
    pub seed: u64,

    /// Output directory for report files.
    #[arg(long)]
    pub out_dir: PathBuf,
}

pub fn run(args: SkewArgs) -> Result<()> {
    let m = measure::by_name(&args.measure)?;
    let axis = SkewAxis::by_name(&args.axis)?;
    let corrs = parse_f64_list(&args.corrs)?;
    let values = parse_f64_list(&args.values)?;
    let cells = skew_surface(&SkewSurfaceSpec {
        measure: m,
        axis,
        corrs: &corrs,
        values: &values,
        repeats: args.repeats,
        alpha: args.alpha,
        beta: args.beta,
        seed: args.seed,
    })?;

    ensure_out_dir(&args.out_dir)?;
    let mut csv = Vec::new();
    report::skew_surface_csv(&mut csv, axis.name(), &cells)?;
    write_file(&args.out_dir, "surface.csv", &csv)?;

    let params = vec![
        ("measure".to_string(), args.measure.clone()),
        ("axis".to_string(), args.axis.clone()),
        ("corrs".to_string(), args.corrs.clone()),
        ("values".to_string(), args.values.clone()),
        ("repeats".to_string(), format!("{}", args.repeats)),
        ("alpha".to_string(), format!("{}", args.alpha)),
        ("beta".to_string(), format!("{}", args.beta)),
        ("seed".to_string(), format!("{}", args.seed)),
    ];
    write_file(
        &args.out_dir,
        "manifest.json",
        report::manifest_json("skew", &params).as_bytes(),
    )?;

    println!("skew surface: {} cells written", cells.len());
    Ok(())
}
