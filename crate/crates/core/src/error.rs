use std::path::PathBuf;

/// Errors produced by the fairkm library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("row {row}, column {column}: cannot parse {value:?} as a finite number")]
    Parse {
        row: u64,
        column: usize,
        value: String,
    },

    #[error("row {row}: expected at least {expected} fields, found {found}")]
    RaggedRow {
        row: u64,
        expected: usize,
        found: usize,
    },

    #[error("malformed CSV: {0}")]
    Csv(String),

    #[error("input contains no data rows")]
    Empty,

    #[error("dimension {dim} is constant; cannot normalize")]
    ConstantDimension { dim: usize },

    #[error("points have inconsistent dimensions: expected {expected}, found {found} at point {index}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("coordinate {dim} of point {index} is not finite")]
    NonFinite { index: usize, dim: usize },

    #[error("requested {requested} points but only {available} are available")]
    SampleTooLarge { requested: usize, available: usize },

    #[error("k = {k} is invalid for a dataset of {n} points")]
    InvalidK { k: usize, n: usize },

    #[error("all points are identical; aspect ratio is undefined")]
    NoDistinctPoints,

    #[error("infeasible instance: seeding needed {anchors} anchors but k = {k}")]
    Infeasible { anchors: usize, k: usize },

    #[error("center set is empty")]
    EmptyCenters,

    #[error("brute force would enumerate {subsets} subsets (limit {limit})")]
    SearchTooLarge { subsets: u128, limit: u128 },

    #[error("no subset of size {k} satisfies the radius constraints")]
    NoFeasibleSubset { k: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
