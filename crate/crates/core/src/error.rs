use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by the attribution engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: file is empty (no header line)")]
    EmptyFile { path: PathBuf },

    #[error("column {name:?} not found in header")]
    UnknownColumn { name: String },

    #[error("column name {name:?} appears more than once in the header")]
    DuplicateColumn { name: String },

    #[error("header contains an empty column name")]
    EmptyColumnName,

    #[error("target column {target:?} has {distinct} distinct value(s); need at least 2 classes")]
    DegenerateTarget { target: String, distinct: usize },

    #[error("line {line}: expected {expected} fields, found {found}")]
    RowArity { line: u64, expected: usize, found: usize },

    #[error("line {line}, column {column:?}: cannot parse {value:?} as a finite number")]
    NumericParse {
        line: u64,
        column: String,
        value: String,
    },

    #[error("line {line}: class label {label:?} is not one of the known labels")]
    UnknownClassLabel { line: u64, label: String },

    #[error("line {line}: class label is missing")]
    MissingClassLabel { line: u64 },

    #[error("dataset has no rows")]
    EmptyDataset,

    #[error("{name} must be at least 1 (got {value})")]
    InvalidParameter { name: &'static str, value: usize },

    #[error("column {column:?}: unseen category {value:?} and the partition has no fallback group")]
    UnseenCategory { column: String, value: String },

    #[error("column {column:?}: missing value, but the partition has no missing part")]
    MissingValueWithoutPart { column: String },

    #[error("column {column:?}: value kind does not match the partition kind")]
    ValueKindMismatch { column: String },

    #[error("expected {expected} weights, found {found}")]
    WeightCount { expected: usize, found: usize },

    #[error("weight for variable {variable:?} is {value}; weights must lie in [0, 1]")]
    WeightOutOfRange { variable: String, value: f64 },

    #[error("smoothing must be a finite non-negative number (got {0})")]
    InvalidSmoothing(f64),

    #[error("zero count with smoothing 0 would produce log(0): {detail}")]
    ZeroCount { detail: String },

    #[error("{path}: not a valid model file: {detail}")]
    ModelFormat { path: PathBuf, detail: String },

    #[error("{path}: unsupported model format version {found} (supported: {supported})")]
    ModelVersion {
        path: PathBuf,
        found: u64,
        supported: u64,
    },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("positive and negative class must differ (both are index {0})")]
    SameClassPair(usize),

    #[error("class index {index} out of range (model has {count} classes)")]
    ClassIndex { index: usize, count: usize },

    #[error("class label {label:?} is not one of {known:?}")]
    UnknownLabel { label: String, known: Vec<String> },

    #[error("variable index {index} out of range (model has {count} variables)")]
    VariableIndex { index: usize, count: usize },

    #[error("part index {part} out of range for variable {variable:?} ({count} parts)")]
    PartIndex {
        variable: String,
        part: usize,
        count: usize,
    },

    #[error("instance has {found} values, model has {expected} variables")]
    InstanceArity { expected: usize, found: usize },

    #[error(
        "refusing exhaustive Shapley for d={d}: enumeration costs O(2^{d}) coalition values \
         (limit is d={limit})"
    )]
    CoalitionBlowup { d: usize, limit: usize },

    #[error("sampling budget must be at least 1")]
    EmptyBudget,

    #[error("attribution values sum to zero; normalized shares are undefined")]
    ZeroSumAttribution,

    #[error("input slices differ in length: {a} vs {b}")]
    LengthMismatch { a: usize, b: usize },

    #[error("need at least 2 observations, got {0}")]
    TooFewObservations(usize),

    #[error("rank correlation undefined: the {side} values are fully tied")]
    UndefinedCorrelation { side: &'static str },

    #[error("correlation input contains a non-finite value")]
    NonFiniteInput,

    #[error("Pearson correlation undefined: the {side} values have zero variance")]
    ZeroVariance { side: &'static str },

    #[error("rank correlation is undefined on every row; nothing to aggregate")]
    AllRowsUndefined,

    #[error("attribution matrices have mismatched shapes: {detail}")]
    ShapeMismatch { detail: String },
}
