//! Plain-text key-value configuration files.
//!
//! One `key = value` pair per line; `#` starts a comment; blank lines are
//! ignored. Keys mirror the CLI flag names with underscores (label_col,
//! score_col, label_positive, bins, ...). Values stay strings; the consumer
//! applies precedence CLI > config > defaults and parses types.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

pub fn parse(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::ConfigFile {
                line: i + 1,
                message: format!("expected key = value, got {line:?}"),
            });
        };
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() {
            return Err(Error::ConfigFile {
                line: i + 1,
                message: "empty key".into(),
            });
        }
        out.insert(key.to_string(), value.to_string());
    }
    Ok(out)
}

pub fn load(path: &Path) -> Result<BTreeMap<String, String>> {
    parse(&std::fs::read_to_string(path)?)
}
