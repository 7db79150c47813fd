//! Shared flag groups and CLI-over-config-over-default resolution.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::Args;

use perfslice::config;
use perfslice::dataset::{load_csv, CsvSchema, Dataset};

/// Input CSV plus schema declaration. Every flag may instead come from the
/// config file; explicit flags win.
#[derive(Args, Debug, Clone)]
pub struct SchemaOpts {
    /// Input CSV file (header row required).
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Plain-text `key = value` config file. Precedence: CLI > config > defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Name of the binary label column.
    #[arg(long)]
    pub label_col: Option<String>,

    /// Name of the prediction score column.
    #[arg(long)]
    pub score_col: Option<String>,

    /// Label value mapped to 1; the remaining value maps to 0.
    #[arg(long)]
    pub label_positive: Option<String>,

    /// Equal-frequency bins per numeric attribute.
    #[arg(long)]
    pub bins: Option<usize>,
}

pub struct ResolvedSchema {
    pub schema: CsvSchema,
    pub bins: usize,
    pub config: BTreeMap<String, String>,
}

impl SchemaOpts {
    pub fn config_map(&self) -> Result<BTreeMap<String, String>> {
        match &self.config {
            Some(path) => config::load(path)
                .with_context(|| format!("reading config file {}", path.display())),
            None => Ok(BTreeMap::new()),
        }
    }

    pub fn resolve(&self) -> Result<ResolvedSchema> {
        let cfg = self.config_map()?;
        let label_col = resolve_opt(self.label_col.clone(), &cfg, "label_col")?;
        let score_col = resolve_opt(self.score_col.clone(), &cfg, "score_col")?;
        let Some(label_col) = label_col else {
            bail!("missing --label-col (or label_col in the config file)");
        };
        let Some(score_col) = score_col else {
            bail!("missing --score-col (or score_col in the config file)");
        };
        let positive_label = resolve_opt(self.label_positive.clone(), &cfg, "label_positive")?;
        let bins = resolve(self.bins, &cfg, "bins", 5usize)?;
        if bins < 2 {
            bail!("--bins must be at least 2");
        }
        Ok(ResolvedSchema {
            schema: CsvSchema {
                label_col,
                score_col,
                positive_label,
            },
            bins,
            config: cfg,
        })
    }

    pub fn load(&self) -> Result<(Dataset, ResolvedSchema)> {
        let resolved = self.resolve()?;
        let Some(input) = &self.input else {
            bail!("missing --input");
        };
        let ds = load_csv(input, &resolved.schema)
            .with_context(|| format!("loading {}", input.display()))?;
        Ok((ds, resolved))
    }
}

/// CLI value if set, else config value parsed from string, else default.
pub fn resolve<T>(
    cli: Option<T>,
    cfg: &BTreeMap<String, String>,
    key: &str,
    default: T,
) -> Result<T>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    Ok(resolve_opt(cli, cfg, key)?.unwrap_or(default))
}

pub fn resolve_opt<T>(
    cli: Option<T>,
    cfg: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    if cli.is_some() {
        return Ok(cli);
    }
    match cfg.get(key) {
        Some(raw) => match raw.parse::<T>() {
            Ok(v) => Ok(Some(v)),
            Err(e) => bail!("config key {key} = {raw:?}: {e}"),
        },
        None => Ok(None),
    }
}

/// Flag resolution for booleans that default to false: an explicit CLI flag
/// wins, otherwise the config may set `key = true`.
pub fn resolve_flag(cli: bool, cfg: &BTreeMap<String, String>, key: &str) -> Result<bool> {
    if cli {
        return Ok(true);
    }
    resolve(None, cfg, key, false)
}

pub fn parse_f64_list(raw: &str) -> Result<Vec<f64>> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("cannot parse {s:?} as a number"))
        })
        .collect()
}

pub fn ensure_out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))
}

pub fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    let path = dir.join(name);
    std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}
