use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("record `{id}`: {message}")]
    InvalidRecord { id: String, message: String },

    #[error("duplicate id `{0}`")]
    DuplicateId(String),

    #[error("no generation record with id `{0}`")]
    UnknownId(String),

    #[error("no entailment matrix for record `{0}`")]
    MissingEntailment(String),

    #[error("entailment `{id}`: expected {expected}x{expected} matrix, found {found}")]
    ShapeMismatch {
        id: String,
        expected: usize,
        found: String,
    },

    #[error("entailment `{id}`: entry ({row}, {col}) = {value} is outside [0, 1]")]
    OutOfRange {
        id: String,
        row: usize,
        col: usize,
        value: f64,
    },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("matrix is not symmetric: |m[{row}][{col}] - m[{col}][{row}]| = {gap:e}")]
    NotSymmetric { row: usize, col: usize, gap: f64 },

    #[error("kernel matrix is not positive definite (factorization failed at pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("kernel matrix is not PSD-certified (min eigenvalue {min_eigenvalue:e})")]
    NotCertified { min_eigenvalue: f64 },

    #[error("exact enumeration over {n} elements exceeds the bound of {bound}")]
    TooLarge { n: usize, bound: usize },

    #[error("unsupported method `{0}`: it needs live model access")]
    UnsupportedMethod(String),

    #[error("unknown method `{0}`")]
    UnknownMethod(String),

    #[error("method `{method}` unavailable for record `{id}`: {reason}")]
    Unavailable {
        method: String,
        id: String,
        reason: String,
    },

    #[error("AUROC undefined for `{method}`: {n_correct} correct, {n_incorrect} incorrect")]
    SingleClass {
        method: String,
        n_correct: usize,
        n_incorrect: usize,
    },

    #[error("non-finite score for `{id}` ({method})")]
    NonFinite { id: String, method: String },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
