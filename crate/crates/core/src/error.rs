use thiserror::Error;

use crate::records::FieldLevel;

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("unexpected CSV header {0:?}; expected record_id,doi,pub_year,citations,fields,affiliations")]
    Header(String),
    #[error("row {row}: {reason}")]
    Row { row: usize, reason: String },
    #[error("duplicate record_id {0:?}")]
    DuplicateId(String),
    #[error("unknown field level {0:?}")]
    UnknownLevel(String),
    #[error("unknown format {0:?}")]
    UnknownFormat(String),
    #[error("malformed field token {0:?}")]
    Field(String),
    #[error("affiliation filter needs at least one variant")]
    NoVariants,
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Error)]
pub enum NormalizeError {
    #[error("min_cell_size must be at least 1")]
    MinCellSize,
    #[error("no reference record carries a field assignment at level {0}")]
    NoAssignments(FieldLevel),
    #[error("rates file row {row}: {reason}")]
    RatesRow { row: usize, reason: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Error)]
pub enum CssError {
    #[error("cannot classify an empty score list")]
    Empty,
    #[error("iterations must be at least 1")]
    Iterations,
    #[error("score at position {0} is not a finite non-negative number")]
    InvalidScore(usize),
}

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("series lengths differ (x: {x}, y: {y}, ids: {ids})")]
    LengthMismatch { x: usize, y: usize, ids: usize },
    #[error("need at least {needed} observations, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("series {0} has zero variance")]
    ZeroVariance(&'static str),
    #[error("all values of series {0} are tied")]
    AllTied(&'static str),
    #[error("non-finite value at position {0}")]
    NonFinite(usize),
    #[error("confidence level {0} outside (0, 1)")]
    Level(f64),
    #[error("{0} is undefined for this input")]
    Undefined(&'static str),
    #[error("label {label} at position {pos} outside 0..{k}")]
    LabelRange { pos: usize, label: usize, k: usize },
    #[error("contingency table is not square")]
    NotSquare,
    #[error("contingency table is empty")]
    EmptyTable,
    #[error("value {0} outside [-1, 1]")]
    OutOfRange(f64),
}
