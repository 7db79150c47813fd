use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("csv parse failure at row {row}, column {column}: {message}")]
    CsvCell {
        row: usize,
        column: String,
        message: String,
    },

    #[error("csv read failure: {0}")]
    CsvRead(#[from] csv::Error),

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("column {0:?} not found in header")]
    MissingColumn(String),

    #[error("label column {column:?} is not binary; distinct values: {values:?}")]
    NonBinaryLabel { column: String, values: Vec<String> },

    #[error("label value {value:?} has no declared mapping to 0/1")]
    UnmappedLabel { value: String },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("invalid label {value} at index {index}; labels must be 0 or 1")]
    InvalidLabel { index: usize, value: f64 },

    #[error("non-finite score at index {0}")]
    NonFiniteScore(usize),

    #[error("measure {measure} is undefined on this input: {reason}")]
    UndefinedMeasure {
        measure: &'static str,
        reason: &'static str,
    },

    #[error("unknown measure {0:?}")]
    UnknownMeasure(String),

    #[error("unknown correction method {0:?}")]
    UnknownCorrection(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("config file parse failure at line {line}: {message}")]
    ConfigFile { line: usize, message: String },

    #[error("injection requires a nonempty cover")]
    EmptyCover,

    #[error("no injectable pattern candidate; try a wider cover-fraction band")]
    NoInjectableCandidate,

    #[error("degenerate synthetic sample: size {size} with quantile {q} leaves a class empty")]
    DegenerateSample { size: usize, q: f64 },

    #[error("{0}")]
    Internal(String),
}
