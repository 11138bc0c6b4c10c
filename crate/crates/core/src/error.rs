use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("entry ({row}, {col}) = {value} lies outside a {rows}x{cols} matrix")]
    OutOfBounds {
        row: usize,
        col: usize,
        value: f64,
        rows: usize,
        cols: usize,
    },

    #[error("dimension mismatch in {op}: {lhs:?} vs {rhs:?}")]
    Dimension {
        op: &'static str,
        lhs: (usize, usize),
        rhs: (usize, usize),
    },

    #[error("grid too small: {cells} cells, at least {min} required")]
    GridTooSmall { cells: usize, min: usize },

    #[error("invalid spacing {0}: must be finite and positive")]
    InvalidSpacing(f64),

    #[error(
        "operator order k={0} is not implemented; only k=2 is available \
         (higher orders need the Vandermonde boundary construction)"
    )]
    OrderNotImplemented(u32),

    #[error("operator order k={0} must be an even positive integer")]
    InvalidOrder(u32),

    #[error("over-damped material at node {node}: loss term {loss} >= 1")]
    OverDamped { node: usize, loss: f64 },

    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },

    #[error("config parse error: {0}")]
    Parse(String),

    #[error("unknown preset {0:?}")]
    UnknownPreset(String),

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Configuration problems map to exit code 1, everything else to 2.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Validation { .. }
                | Error::Parse(_)
                | Error::UnknownPreset(_)
                | Error::GridTooSmall { .. }
                | Error::InvalidSpacing(_)
                | Error::OrderNotImplemented(_)
                | Error::InvalidOrder(_)
                | Error::OverDamped { .. }
        )
    }
}
