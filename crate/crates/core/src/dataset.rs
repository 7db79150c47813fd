//! Data model: attribute columns, labels, predictions, the selector/pattern
//! description language, and cover computation.

use std::fmt;
use std::io::Write;
use std::path::Path;

use crate::bitset::Bitset;
use crate::error::{Error, Result};
use crate::metrics::LabeledScoreSet;

/// One attribute column: categorical codes with a value table, or reals with
/// NaN marking missing entries.
#[derive(Debug, Clone)]
pub enum ColumnData {
    Nominal {
        /// Per-row code into `values`; None = missing.
        codes: Vec<Option<u32>>,
        values: Vec<String>,
    },
    Numeric(Vec<f64>),
}

#[derive(Debug, Clone)]
pub struct Attribute {
    pub name: String,
    pub data: ColumnData,
}

/// Immutable tabular dataset with binary labels and real-valued predictions.
#[derive(Debug, Clone)]
pub struct Dataset {
    attributes: Vec<Attribute>,
    labels: Vec<u8>,
    scores: Vec<f64>,
    label_name: String,
    score_name: String,
}

impl Dataset {
    pub fn from_parts(
        attributes: Vec<Attribute>,
        labels: Vec<u8>,
        scores: Vec<f64>,
        label_name: impl Into<String>,
        score_name: impl Into<String>,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        if scores.len() != n {
            return Err(Error::LengthMismatch(format!(
                "{} labels vs {} scores",
                n,
                scores.len()
            )));
        }
        for attr in &attributes {
            let len = match &attr.data {
                ColumnData::Nominal { codes, .. } => codes.len(),
                ColumnData::Numeric(v) => v.len(),
            };
            if len != n {
                return Err(Error::LengthMismatch(format!(
                    "attribute {:?} has {} rows, expected {}",
                    attr.name, len, n
                )));
            }
        }
        for (i, &y) in labels.iter().enumerate() {
            if y > 1 {
                return Err(Error::InvalidLabel {
                    index: i,
                    value: y as f64,
                });
            }
        }
        for (i, &s) in scores.iter().enumerate() {
            if !s.is_finite() {
                return Err(Error::NonFiniteScore(i));
            }
        }
        Ok(Dataset {
            attributes,
            labels,
            scores,
            label_name: label_name.into(),
            score_name: score_name.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn label_name(&self) -> &str {
        &self.label_name
    }

    pub fn score_name(&self) -> &str {
        &self.score_name
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&y| y == 1).count()
    }

    pub fn negatives(&self) -> usize {
        self.len() - self.positives()
    }

    /// The whole dataset as a labeled score multiset.
    pub fn full_set(&self) -> LabeledScoreSet {
        LabeledScoreSet::new(self.labels.clone(), self.scores.clone())
            .expect("dataset invariants guarantee validity")
    }

    /// Row subset, preserving schema and attribute order.
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        let attributes = self
            .attributes
            .iter()
            .map(|attr| Attribute {
                name: attr.name.clone(),
                data: match &attr.data {
                    ColumnData::Nominal { codes, values } => ColumnData::Nominal {
                        codes: rows.iter().map(|&r| codes[r]).collect(),
                        values: values.clone(),
                    },
                    ColumnData::Numeric(v) => {
                        ColumnData::Numeric(rows.iter().map(|&r| v[r]).collect())
                    }
                },
            })
            .collect();
        Dataset {
            attributes,
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
            scores: rows.iter().map(|&r| self.scores[r]).collect(),
            label_name: self.label_name.clone(),
            score_name: self.score_name.clone(),
        }
    }

    /// Copy with the prediction scores of covered instances multiplied by -1.
    pub fn with_negated_scores(&self, cover: &Bitset) -> Result<Dataset> {
        if cover.count_ones() == 0 {
            return Err(Error::EmptyCover);
        }
        let mut out = self.clone();
        for i in cover.iter_ones() {
            out.scores[i] = -out.scores[i];
        }
        Ok(out)
    }

    /// Write the dataset back out as CSV (attributes, then label, then score).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<&str> = self.attributes.iter().map(|a| a.name.as_str()).collect();
        header.push(&self.label_name);
        header.push(&self.score_name);
        w.write_record(&header)?;
        for row in 0..self.len() {
            let mut record: Vec<String> = Vec::with_capacity(header.len());
            for attr in &self.attributes {
                record.push(match &attr.data {
                    ColumnData::Nominal { codes, values } => match codes[row] {
                        Some(c) => values[c as usize].clone(),
                        None => String::new(),
                    },
                    ColumnData::Numeric(v) => {
                        if v[row].is_finite() {
                            format!("{}", v[row])
                        } else {
                            String::new()
                        }
                    }
                });
            }
            record.push(format!("{}", self.labels[row]));
            record.push(format!("{}", self.scores[row]));
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Declares how to interpret the label and score columns of a CSV file.
#[derive(Debug, Clone)]
pub struct CsvSchema {
    pub label_col: String,
    pub score_col: String,
    /// Label value mapped to 1; the single remaining value maps to 0. When
    /// absent the column must literally contain 0/1.
    pub positive_label: Option<String>,
}

/// Load a CSV file with a header row into a dataset. Every column other than
/// the label and score columns becomes an attribute, typed numeric when all
/// non-missing entries parse as reals and nominal otherwise.
pub fn load_csv(path: &Path, schema: &CsvSchema) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)?;
    let headers: Vec<String> = reader.headers()?.iter().map(|h| h.to_string()).collect();
    let label_idx = headers
        .iter()
        .position(|h| *h == schema.label_col)
        .ok_or_else(|| Error::MissingColumn(schema.label_col.clone()))?;
    let score_idx = headers
        .iter()
        .position(|h| *h == schema.score_col)
        .ok_or_else(|| Error::MissingColumn(schema.score_col.clone()))?;

    let mut raw_labels: Vec<String> = Vec::new();
    let mut scores: Vec<f64> = Vec::new();
    let mut attr_cells: Vec<Vec<String>> = vec![Vec::new(); headers.len()];
    for (row_idx, record) in reader.records().enumerate() {
        let record = record?;
        // 1-based data rows, header excluded.
        let row = row_idx + 1;
        let label_raw = record.get(label_idx).unwrap_or("").trim().to_string();
        if label_raw.is_empty() {
            return Err(Error::CsvCell {
                row,
                column: schema.label_col.clone(),
                message: "missing label".into(),
            });
        }
        let score_raw = record.get(score_idx).unwrap_or("").trim();
        let score: f64 = score_raw.parse().map_err(|_| Error::CsvCell {
            row,
            column: schema.score_col.clone(),
            message: format!("cannot parse {score_raw:?} as a real number"),
        })?;
        if !score.is_finite() {
            return Err(Error::CsvCell {
                row,
                column: schema.score_col.clone(),
                message: format!("score {score_raw:?} is not finite"),
            });
        }
        raw_labels.push(label_raw);
        scores.push(score);
        for (col, cell) in record.iter().enumerate() {
            if col != label_idx && col != score_idx {
                attr_cells[col].push(cell.trim().to_string());
            }
        }
    }
    if raw_labels.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let labels = map_labels(
        &raw_labels,
        &schema.label_col,
        schema.positive_label.as_deref(),
    )?;

    let mut attributes = Vec::new();
    for (col, header) in headers.iter().enumerate() {
        if col == label_idx || col == score_idx {
            continue;
        }
        attributes.push(Attribute {
            name: header.clone(),
            data: type_column(&attr_cells[col]),
        });
    }

    Dataset::from_parts(
        attributes,
        labels,
        scores,
        schema.label_col.clone(),
        schema.score_col.clone(),
    )
}

fn map_labels(raw: &[String], column: &str, positive: Option<&str>) -> Result<Vec<u8>> {
    let mut distinct: Vec<&str> = Vec::new();
    for v in raw {
        if !distinct.contains(&v.as_str()) {
            distinct.push(v);
        }
    }
    distinct.sort_unstable();
    if distinct.len() > 2 {
        return Err(Error::NonBinaryLabel {
            column: column.to_string(),
            values: distinct.iter().map(|s| s.to_string()).collect(),
        });
    }
    match positive {
        Some(pos) => {
            if !distinct.contains(&pos) {
                return Err(Error::UnmappedLabel {
                    value: pos.to_string(),
                });
            }
            Ok(raw.iter().map(|v| u8::from(v == pos)).collect())
        }
        None => {
            let all_binary = distinct.iter().all(|v| *v == "0" || *v == "1");
            if !all_binary {
                return Err(Error::NonBinaryLabel {
                    column: column.to_string(),
                    values: distinct.iter().map(|s| s.to_string()).collect(),
                });
            }
            Ok(raw.iter().map(|v| u8::from(v == "1")).collect())
        }
    }
}

fn type_column(cells: &[String]) -> ColumnData {
    let all_numeric = cells
        .iter()
        .all(|c| c.is_empty() || c.parse::<f64>().is_ok());
    if all_numeric {
        ColumnData::Numeric(
            cells
                .iter()
                .map(|c| {
                    if c.is_empty() {
                        f64::NAN
                    } else {
                        // Non-finite parses (inf, nan spellings) count as missing.
                        c.parse::<f64>().unwrap()
                    }
                })
                .collect(),
        )
    } else {
        let mut values: Vec<String> = Vec::new();
        let mut codes = Vec::with_capacity(cells.len());
        for c in cells {
            if c.is_empty() {
                codes.push(None);
            } else {
                let code = match values.iter().position(|v| v == c) {
                    Some(i) => i as u32,
                    None => {
                        values.push(c.clone());
                        (values.len() - 1) as u32
                    }
                };
                codes.push(Some(code));
            }
        }
        ColumnData::Nominal { codes, values }
    }
}

/// A boolean condition on a single attribute.
#[derive(Debug, Clone, PartialEq)]
pub struct Selector {
    pub attribute: usize,
    pub kind: SelectorKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SelectorKind {
    /// attribute = value (nominal code)
    Equals(u32),
    /// attribute in [lo, hi), or [lo, hi] when `closed_hi` (the highest bin).
    Interval { lo: f64, hi: f64, closed_hi: bool },
}

impl Selector {
    /// Evaluate on one instance; missing values never match.
    pub fn matches(&self, ds: &Dataset, row: usize) -> bool {
        match (&self.kind, &ds.attributes()[self.attribute].data) {
            (SelectorKind::Equals(code), ColumnData::Nominal { codes, .. }) => {
                codes[row] == Some(*code)
            }
            (SelectorKind::Interval { lo, hi, closed_hi }, ColumnData::Numeric(v)) => {
                let x = v[row];
                x.is_finite() && x >= *lo && (x < *hi || (*closed_hi && x == *hi))
            }
            _ => false,
        }
    }

    /// Rows of `ds` matched by this selector.
    pub fn rows(&self, ds: &Dataset) -> Bitset {
        let mut bits = Bitset::zeros(ds.len());
        for row in 0..ds.len() {
            if self.matches(ds, row) {
                bits.set(row);
            }
        }
        bits
    }

    pub fn render(&self, ds: &Dataset) -> String {
        let attr = &ds.attributes()[self.attribute];
        match (&self.kind, &attr.data) {
            (SelectorKind::Equals(code), ColumnData::Nominal { values, .. }) => {
                format!("{}={}", attr.name, values[*code as usize])
            }
            (SelectorKind::Interval { lo, hi, closed_hi }, _) => {
                let close = if *closed_hi { "]" } else { ")" };
                format!("{}∈[{}, {}{}", attr.name, lo, hi, close)
            }
            (SelectorKind::Equals(code), ColumnData::Numeric(_)) => {
                format!("{}={}", attr.name, code)
            }
        }
    }
}

/// Generate the selector pool: one equality selector per observed nominal
/// value, and up to `bins` equal-frequency intervals per numeric attribute
/// (duplicate edges merged). Selectors covering every instance are dropped.
/// Order is deterministic: attribute index, then value, then interval edge.
pub fn generate_selectors(ds: &Dataset, bins: usize) -> Vec<Selector> {
    assert!(bins >= 2, "numeric attributes need at least 2 bins");
    let mut out = Vec::new();
    for (ai, attr) in ds.attributes().iter().enumerate() {
        match &attr.data {
            ColumnData::Nominal { codes, values } => {
                let mut observed: Vec<u32> = Vec::new();
                for code in codes.iter().flatten() {
                    if !observed.contains(code) {
                        observed.push(*code);
                    }
                }
                observed.sort_unstable_by(|&a, &b| values[a as usize].cmp(&values[b as usize]));
                for code in observed {
                    out.push(Selector {
                        attribute: ai,
                        kind: SelectorKind::Equals(code),
                    });
                }
            }
            ColumnData::Numeric(v) => {
                let mut sorted: Vec<f64> = v.iter().copied().filter(|x| x.is_finite()).collect();
                sorted.sort_unstable_by(f64::total_cmp);
                if sorted.is_empty() {
                    continue;
                }
                let edges = equal_frequency_edges(&sorted, bins);
                let mut bounds = vec![sorted[0]];
                bounds.extend(edges);
                bounds.push(sorted[sorted.len() - 1]);
                let last = bounds.len() - 2;
                for (k, pair) in bounds.windows(2).enumerate() {
                    if pair[0] >= pair[1] && !(k == last && pair[0] == pair[1]) {
                        continue;
                    }
                    out.push(Selector {
                        attribute: ai,
                        kind: SelectorKind::Interval {
                            lo: pair[0],
                            hi: pair[1],
                            closed_hi: k == last,
                        },
                    });
                }
            }
        }
    }
    // A selector matching every instance carries no information.
    out.retain(|sel| sel.rows(ds).count_ones() < ds.len());
    out
}

/// Interior cut points between equal-frequency bins: the midpoint between the
/// order statistics around each cut index, deduplicated.
fn equal_frequency_edges(sorted: &[f64], bins: usize) -> Vec<f64> {
    let n = sorted.len();
    let mut edges: Vec<f64> = Vec::new();
    for j in 1..bins {
        let cut = j * n / bins;
        if cut == 0 || cut >= n {
            continue;
        }
        // Duplicate values spanning the cut produce no edge (merged bins).
        if sorted[cut - 1] < sorted[cut] {
            let edge = (sorted[cut - 1] + sorted[cut]) / 2.0;
            if edges.last() != Some(&edge) {
                edges.push(edge);
            }
        }
    }
    edges
}

/// Selector pool with precomputed row sets for fast cover computation.
pub struct SelectorTable {
    selectors: Vec<Selector>,
    rows: Vec<Bitset>,
    attribute_of: Vec<usize>,
    n_rows: usize,
}

impl SelectorTable {
    pub fn new(ds: &Dataset, selectors: Vec<Selector>) -> Self {
        let rows: Vec<Bitset> = selectors.iter().map(|s| s.rows(ds)).collect();
        let attribute_of = selectors.iter().map(|s| s.attribute).collect();
        SelectorTable {
            selectors,
            rows,
            attribute_of,
            n_rows: ds.len(),
        }
    }

    /// Rebind the same selector pool to another dataset with the same schema
    /// (e.g. a validation split).
    pub fn rebind(&self, ds: &Dataset) -> SelectorTable {
        SelectorTable::new(ds, self.selectors.clone())
    }

    pub fn len(&self) -> usize {
        self.selectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selectors.is_empty()
    }

    pub fn selectors(&self) -> &[Selector] {
        &self.selectors
    }

    pub fn selector(&self, id: u32) -> &Selector {
        &self.selectors[id as usize]
    }

    pub fn rows_of(&self, id: u32) -> &Bitset {
        &self.rows[id as usize]
    }

    pub fn attribute_of(&self, id: u32) -> usize {
        self.attribute_of[id as usize]
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }
}

/// A conjunction of selectors: sorted, duplicate-free ids, at most one per
/// attribute. The empty pattern covers every instance.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Pattern {
    ids: Vec<u32>,
}

impl Pattern {
    pub fn empty() -> Self {
        Pattern { ids: Vec::new() }
    }

    pub fn new(mut ids: Vec<u32>, table: &SelectorTable) -> Result<Self> {
        ids.sort_unstable();
        ids.dedup();
        let mut attrs: Vec<usize> = ids.iter().map(|&id| table.attribute_of(id)).collect();
        attrs.sort_unstable();
        attrs.dedup();
        if attrs.len() != ids.len() {
            return Err(Error::InvalidConfig(
                "pattern uses more than one selector on the same attribute".into(),
            ));
        }
        Ok(Pattern { ids })
    }

    pub(crate) fn from_sorted_ids(ids: Vec<u32>) -> Self {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        Pattern { ids }
    }

    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// True when `self` is a strict subset of `other`'s selectors.
    pub fn is_generalization_of(&self, other: &Pattern) -> bool {
        self.ids.len() < other.ids.len() && self.ids.iter().all(|id| other.ids.contains(id))
    }

    pub fn render(&self, table: &SelectorTable, ds: &Dataset) -> String {
        if self.ids.is_empty() {
            return "∅".to_string();
        }
        self.ids
            .iter()
            .map(|&id| table.selector(id).render(ds))
            .collect::<Vec<_>>()
            .join(" ∧ ")
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ids.is_empty() {
            write!(f, "∅")
        } else {
            write!(
                f,
                "{}",
                self.ids
                    .iter()
                    .map(|id| id.to_string())
                    .collect::<Vec<_>>()
                    .join("∧")
            )
        }
    }
}

/// Compute a pattern's cover: the instances on which every selector holds.
pub fn cover(p: &Pattern, table: &SelectorTable) -> Bitset {
    let mut bits = Bitset::ones(table.n_rows());
    for &id in p.ids() {
        bits = bits.and(table.rows_of(id));
    }
    bits
}

/// Labels and scores of exactly the covered instances, in instance order.
pub fn extract(cover: &Bitset, ds: &Dataset) -> LabeledScoreSet {
    let mut labels = Vec::with_capacity(cover.count_ones());
    let mut scores = Vec::with_capacity(labels.capacity());
    for i in cover.iter_ones() {
        labels.push(ds.labels()[i]);
        scores.push(ds.scores()[i]);
    }
    LabeledScoreSet::new(labels, scores).expect("dataset invariants guarantee validity")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_temp_csv(content: &str) -> std::path::PathBuf {
        let mut path = std::env::temp_dir();
        path.push(format!(
            "perfslice_test_{}_{}.csv",
            std::process::id(),
            content.len()
        ));
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        path
    }

    fn schema() -> CsvSchema {
        CsvSchema {
            label_col: "y".into(),
            score_col: "yhat".into(),
            positive_label: None,
        }
    }

    #[test]
    fn load_csv_basic() {
        let path =
            write_temp_csv("sex,age,y,yhat\nf,30,1,0.9\nm,40,0,0.2\nf,25,1,0.7\nm,35,0,0.4\n");
        let ds = load_csv(&path, &schema()).unwrap();
        std::fs::remove_file(&path).unwrap();
        assert_eq!(ds.len(), 4);
        assert_eq!(ds.attributes().len(), 2);
        assert_eq!(ds.labels(), &[1, 0, 1, 0]);
        assert!(matches!(
            ds.attributes()[0].data,
            ColumnData::Nominal { .. }
        ));
        assert!(matches!(ds.attributes()[1].data, ColumnData::Numeric(_)));
    }

    #[test]
    fn load_csv_label_mapping() {
        let path = write_temp_csv("x,y,yhat\n1,sick,0.9\n2,healthy,0.2\n");
        let mut s = schema();
        s.positive_label = Some("sick".into());
        let ds = load_csv(&path, &s).unwrap();
        std::fs::remove_file(&path).unwrap();
        assert_eq!(ds.labels(), &[1, 0]);
    }

    #[test]
    fn load_csv_rejects_non_binary_labels() {
        let path = write_temp_csv("x,y,yhat\n1,a,0.9\n2,b,0.2\n3,c,0.1\n");
        let err = load_csv(&path, &schema()).unwrap_err();
        std::fs::remove_file(&path).unwrap();
        match err {
            Error::NonBinaryLabel { values, .. } => {
                assert_eq!(values, vec!["a", "b", "c"]);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn load_csv_rejects_nan_score() {
        let path = write_temp_csv("x,y,yhat\n1,1,0.9\n2,0,NaN\n");
        let err = load_csv(&path, &schema()).unwrap_err();
        std::fs::remove_file(&path).unwrap();
        match err {
            Error::CsvCell { row, column, .. } => {
                assert_eq!(row, 2);
                assert_eq!(column, "yhat");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    fn toy_dataset() -> Dataset {
        Dataset::from_parts(
            vec![
                Attribute {
                    name: "sex".into(),
                    data: ColumnData::Nominal {
                        codes: vec![Some(0), Some(1), Some(0)],
                        values: vec!["f".into(), "m".into()],
                    },
                },
                Attribute {
                    name: "age".into(),
                    data: ColumnData::Numeric(vec![20.0, 30.0, 40.0]),
                },
            ],
            vec![1, 0, 1],
            vec![0.9, 0.5, 0.2],
            "y",
            "yhat",
        )
        .unwrap()
    }

    #[test]
    fn selectors_for_nominal_values() {
        let ds = Dataset::from_parts(
            vec![Attribute {
                name: "a".into(),
                data: ColumnData::Nominal {
                    codes: vec![Some(0), Some(1), Some(0)],
                    values: vec!["a".into(), "b".into()],
                },
            }],
            vec![1, 0, 1],
            vec![0.1, 0.2, 0.3],
            "y",
            "yhat",
        )
        .unwrap();
        let sels = generate_selectors(&ds, 2);
        assert_eq!(sels.len(), 2);
        assert_eq!(sels[0].render(&ds), "a=a");
        assert_eq!(sels[1].render(&ds), "a=b");
    }

    #[test]
    fn equal_frequency_bins_on_one_to_ten() {
        let ds = Dataset::from_parts(
            vec![Attribute {
                name: "x".into(),
                data: ColumnData::Numeric((1..=10).map(|i| i as f64).collect()),
            }],
            vec![1; 10],
            (1..=10).map(|i| i as f64 / 10.0).collect(),
            "y",
            "yhat",
        )
        .unwrap();
        let sels = generate_selectors(&ds, 2);
        assert_eq!(sels.len(), 2);
        assert_eq!(
            sels[0].kind,
            SelectorKind::Interval {
                lo: 1.0,
                hi: 5.5,
                closed_hi: false
            }
        );
        assert_eq!(
            sels[1].kind,
            SelectorKind::Interval {
                lo: 5.5,
                hi: 10.0,
                closed_hi: true
            }
        );
        // Equal-frequency check: each interval covers 5 of the 10 rows.
        assert_eq!(sels[0].rows(&ds).count_ones(), 5);
        assert_eq!(sels[1].rows(&ds).count_ones(), 5);
    }

    #[test]
    fn constant_column_yields_no_selectors() {
        let ds = Dataset::from_parts(
            vec![
                Attribute {
                    name: "c".into(),
                    data: ColumnData::Numeric(vec![7.0, 7.0, 7.0]),
                },
                Attribute {
                    name: "k".into(),
                    data: ColumnData::Nominal {
                        codes: vec![Some(0), Some(0), Some(0)],
                        values: vec!["only".into()],
                    },
                },
            ],
            vec![1, 0, 1],
            vec![0.1, 0.2, 0.3],
            "y",
            "yhat",
        )
        .unwrap();
        assert!(generate_selectors(&ds, 3).is_empty());
    }

    #[test]
    fn generate_selectors_is_deterministic() {
        let ds = toy_dataset();
        let a = generate_selectors(&ds, 2);
        let b = generate_selectors(&ds, 2);
        assert_eq!(a, b);
    }

    #[test]
    fn cover_of_empty_pattern_is_all_ones() {
        let ds = toy_dataset();
        let table = SelectorTable::new(&ds, generate_selectors(&ds, 2));
        let c = cover(&Pattern::empty(), &table);
        assert_eq!(c.count_ones(), 3);
    }

    #[test]
    fn cover_single_selector() {
        let ds = toy_dataset();
        let table = SelectorTable::new(&ds, generate_selectors(&ds, 2));
        let sel_female = (0..table.len() as u32)
            .find(|&id| table.selector(id).render(&ds) == "sex=f")
            .unwrap();
        let p = Pattern::new(vec![sel_female], &table).unwrap();
        let c = cover(&p, &table);
        assert_eq!(c.iter_ones().collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn contradictory_intervals_give_empty_cover() {
        let ds = toy_dataset();
        // Two disjoint intervals on the same attribute: the pattern type
        // forbids this, but the cover primitive must still return the empty set.
        let sels = vec![
            Selector {
                attribute: 1,
                kind: SelectorKind::Interval {
                    lo: 0.0,
                    hi: 25.0,
                    closed_hi: false,
                },
            },
            Selector {
                attribute: 1,
                kind: SelectorKind::Interval {
                    lo: 35.0,
                    hi: 50.0,
                    closed_hi: true,
                },
            },
        ];
        let table = SelectorTable::new(&ds, sels);
        let c = table.rows_of(0).and(table.rows_of(1));
        assert_eq!(c.count_ones(), 0);
        assert!(Pattern::new(vec![0, 1], &table).is_err());
    }

    #[test]
    fn missing_values_never_match() {
        let ds = Dataset::from_parts(
            vec![
                Attribute {
                    name: "n".into(),
                    data: ColumnData::Numeric(vec![1.0, f64::NAN, 3.0]),
                },
                Attribute {
                    name: "c".into(),
                    data: ColumnData::Nominal {
                        codes: vec![Some(0), None, Some(0)],
                        values: vec!["v".into()],
                    },
                },
            ],
            vec![1, 0, 1],
            vec![0.1, 0.2, 0.3],
            "y",
            "yhat",
        )
        .unwrap();
        let sel_num = Selector {
            attribute: 0,
            kind: SelectorKind::Interval {
                lo: 0.0,
                hi: 10.0,
                closed_hi: true,
            },
        };
        assert!(!sel_num.matches(&ds, 1));
        let sel_nom = Selector {
            attribute: 1,
            kind: SelectorKind::Equals(0),
        };
        assert!(!sel_nom.matches(&ds, 1));
        assert_eq!(
            sel_nom.rows(&ds).iter_ones().collect::<Vec<_>>(),
            vec![0, 2]
        );
    }

    #[test]
    fn extract_projects_covered_instances() {
        let ds = toy_dataset();
        let mut c = Bitset::zeros(3);
        c.set(0);
        c.set(2);
        let s = extract(&c, &ds);
        assert_eq!(s.labels(), &[1, 1]);
        assert_eq!(s.scores(), &[0.9, 0.2]);
    }

    #[test]
    fn incremental_cover_matches_scratch() {
        let ds = toy_dataset();
        let table = SelectorTable::new(&ds, generate_selectors(&ds, 2));
        assert!(table.len() >= 3);
        for a in 0..table.len() as u32 {
            for b in (a + 1)..table.len() as u32 {
                if table.attribute_of(a) == table.attribute_of(b) {
                    continue;
                }
                let p = Pattern::new(vec![a, b], &table).unwrap();
                let scratch = cover(&p, &table);
                let parent = cover(&Pattern::new(vec![a], &table).unwrap(), &table);
                let incremental = parent.and(table.rows_of(b));
                assert_eq!(scratch, incremental);
                assert!(scratch.is_subset_of(&parent));
            }
        }
    }
}
