use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid dimensions {dims:?}: {reason}")]
    InvalidDims { dims: Vec<usize>, reason: String },

    #[error("mode {mode} out of range for tensor of order {order}")]
    Mode { mode: usize, order: usize },

    #[error("index {index} out of range (limit {limit})")]
    Index { index: usize, limit: usize },

    #[error("transform error: {0}")]
    Transform(String),

    #[error("transform specs differ between operands")]
    SpecMismatch,

    #[error("imaginary residual {residual:.3e} exceeds {threshold:.1e} relative; transform-domain data is not conjugate-symmetric")]
    NumericConsistency { residual: f64, threshold: f64 },

    #[error("{op} requires a unitary-scaled transform; {kind} is not")]
    UnsupportedSpec { op: &'static str, kind: String },

    #[error("oracle-scale guard exceeded: {rows}x{cols} btph matrix (limit {limit} per side)")]
    OracleScale { rows: usize, cols: usize, limit: usize },

    #[error("matrix is not block-Toeplitz-plus-Hankel: residual {residual:.3e}")]
    Structure { residual: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(&'static str),

    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn format(offset: u64, msg: impl Into<String>) -> Self {
        Error::Format {
            offset,
            message: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
