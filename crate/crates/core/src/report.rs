//! Report serialization: result sets, significance reports, experiment tables,
//! and run manifests. CSV columns follow the result-table layout
//! (interestingness, pattern, ARL, PR AUC, ROC AUC, cover, NCR); undefined
//! metric values appear as "-". All output is byte-deterministic for fixed
//! inputs: no timestamps or wall-clock fields are serialized.

use std::io::Write;

use serde::Serialize;

use crate::dataset::{Dataset, SelectorTable};
use crate::error::Result;
use crate::experiments::{BenchRow, InjectionRun, SkewCell};
use crate::search::ResultSet;
use crate::stats::SignificanceReport;

fn opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x}"),
        None => "-".to_string(),
    }
}

/// Result set as CSV.
pub fn result_set_csv<W: Write>(
    out: W,
    rs: &ResultSet,
    table: &SelectorTable,
    ds: &Dataset,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "interestingness",
        "pattern",
        "arl",
        "pr_auc",
        "roc_auc",
        "cover",
        "ncr",
    ])?;
    for e in &rs.entries {
        w.write_record(&[
            format!("{}", e.interestingness),
            e.pattern.render(table, ds),
            opt(e.diagnostics.arl),
            opt(e.diagnostics.pr_auc),
            opt(e.diagnostics.roc_auc),
            format!("{}", e.diagnostics.cover_size),
            format!("{}", e.diagnostics.ncr),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct JsonEntry {
    pattern: String,
    selector_ids: Vec<u32>,
    interestingness: f64,
    arl: Option<f64>,
    pr_auc: Option<f64>,
    roc_auc: Option<f64>,
    cover: usize,
    ncr: f64,
}

#[derive(Serialize)]
struct JsonResultSet {
    entries: Vec<JsonEntry>,
    evaluated: u64,
    pruned: u64,
    pruned_min_cover: u64,
    expanded: u64,
}

/// Result set as JSON (statistics included, wall time excluded).
pub fn result_set_json(rs: &ResultSet, table: &SelectorTable, ds: &Dataset) -> String {
    let doc = JsonResultSet {
        entries: rs
            .entries
            .iter()
            .map(|e| JsonEntry {
                pattern: e.pattern.render(table, ds),
                selector_ids: e.pattern.ids().to_vec(),
                interestingness: e.interestingness,
                arl: e.diagnostics.arl,
                pr_auc: e.diagnostics.pr_auc,
                roc_auc: e.diagnostics.roc_auc,
                cover: e.diagnostics.cover_size,
                ncr: e.diagnostics.ncr,
            })
            .collect(),
        evaluated: rs.stats.evaluated,
        pruned: rs.stats.pruned,
        pruned_min_cover: rs.stats.pruned_min_cover,
        expanded: rs.stats.expanded,
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

/// Significance report as CSV.
pub fn significance_csv<W: Write>(
    out: W,
    report: &SignificanceReport,
    table: &SelectorTable,
    ds: &Dataset,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "pattern",
        "interestingness",
        "statistic",
        "p_value",
        "adjusted_p",
        "significant",
        "resamples",
        "untestable_reason",
    ])?;
    for r in &report.rows {
        w.write_record(&[
            r.pattern.render(table, ds),
            format!("{}", r.interestingness),
            opt(r.statistic),
            opt(r.p_value),
            opt(r.adjusted_p),
            format!("{}", r.significant),
            format!("{}", r.resamples),
            r.untestable_reason.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct JsonSignificanceRow {
    pattern: String,
    interestingness: f64,
    statistic: Option<f64>,
    p_value: Option<f64>,
    adjusted_p: Option<f64>,
    significant: bool,
    resamples: usize,
    untestable_reason: Option<String>,
}

#[derive(Serialize)]
struct JsonSignificance {
    rows: Vec<JsonSignificanceRow>,
    tested: usize,
    significant: usize,
    filtered: usize,
}

pub fn significance_json(
    report: &SignificanceReport,
    table: &SelectorTable,
    ds: &Dataset,
) -> String {
    let doc = JsonSignificance {
        rows: report
            .rows
            .iter()
            .map(|r| JsonSignificanceRow {
                pattern: r.pattern.render(table, ds),
                interestingness: r.interestingness,
                statistic: r.statistic,
                p_value: r.p_value,
                adjusted_p: r.adjusted_p,
                significant: r.significant,
                resamples: r.resamples,
                untestable_reason: r.untestable_reason.clone(),
            })
            .collect(),
        tested: report.tested,
        significant: report.significant,
        filtered: report.filtered,
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

/// Skew surface as CSV, plot-ready.
pub fn skew_surface_csv<W: Write>(out: W, axis: &str, cells: &[SkewCell]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["corr", axis, "mean_score", "std_dev", "repeats"])?;
    for c in cells {
        w.write_record(&[
            format!("{}", c.corr),
            format!("{}", c.axis_value),
            format!("{}", c.mean_score),
            format!("{}", c.std_dev),
            format!("{}", c.repeats),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Pruning benchmark table as CSV.
pub fn bench_csv<W: Write>(out: W, rows: &[BenchRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "measure",
        "weight",
        "median_secs_pruned",
        "median_secs_unpruned",
        "speedup",
        "evaluated_pruned",
        "evaluated_unpruned",
        "identical_results",
    ])?;
    for r in rows {
        w.write_record(&[
            r.measure.to_string(),
            format!("{}", r.weight),
            format!("{}", r.median_secs_pruned),
            format!("{}", r.median_secs_unpruned),
            format!("{}", r.speedup),
            format!("{}", r.evaluated_pruned),
            format!("{}", r.evaluated_unpruned),
            format!("{}", r.identical_results),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Pruning benchmark CSV without the runtime columns, for byte-reproducible
/// report files.
pub fn bench_csv_deterministic<W: Write>(out: W, rows: &[BenchRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "measure",
        "weight",
        "evaluated_pruned",
        "evaluated_unpruned",
        "node_ratio",
        "identical_results",
    ])?;
    for r in rows {
        w.write_record(&[
            r.measure.to_string(),
            format!("{}", r.weight),
            format!("{}", r.evaluated_pruned),
            format!("{}", r.evaluated_unpruned),
            format!(
                "{}",
                r.evaluated_pruned as f64 / r.evaluated_unpruned as f64
            ),
            format!("{}", r.identical_results),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-rank IoU table of injection runs as CSV.
pub fn injection_csv<W: Write>(
    out: W,
    runs: &[InjectionRun],
    table: &SelectorTable,
    ds: &Dataset,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["config", "rank", "pattern", "interestingness", "iou"])?;
    for run in runs {
        for (rank, (entry, iou)) in run.results.entries.iter().zip(&run.ious).enumerate() {
            w.write_record(&[
                run.label.clone(),
                format!("{}", rank + 1),
                entry.pattern.render(table, ds),
                format!("{}", entry.interestingness),
                format!("{iou}"),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Run manifest: tool version, subcommand, and the effective parameters.
/// Parameters are emitted sorted by key.
pub fn manifest_json(subcommand: &str, params: &[(String, String)]) -> String {
    #[derive(Serialize)]
    struct Manifest<'a> {
        tool: &'a str,
        version: &'a str,
        subcommand: &'a str,
        params: std::collections::BTreeMap<&'a str, &'a str>,
    }
    let doc = Manifest {
        tool: "perfslice",
        version: env!("CARGO_PKG_VERSION"),
        subcommand,
        params: params
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_str()))
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}
