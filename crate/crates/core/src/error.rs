//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Shapes of two operands disagree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A constructor or operation was handed an argument outside its domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A NaN or infinity showed up where only finite values are allowed.
    #[error("non-finite value in {0}")]
    NonFinite(String),

    /// Observation index pairs must be distinct (sampling without replacement).
    #[error("duplicate observation index ({row}, {col})")]
    DuplicateIndex { row: usize, col: usize },

    /// An observation index fell outside the matrix.
    #[error("index ({row}, {col}) out of bounds for a {rows}x{cols} matrix")]
    IndexOutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    /// LAPACK failure bubbling up from a decomposition.
    #[error("linear algebra backend error: {0}")]
    Linalg(#[from] ndarray_linalg::error::LinalgError),

    /// The solver produced a non-finite iterate.
    #[error("solver diverged: non-finite iterate at iteration {iteration}")]
    Divergence { iteration: usize },

    /// The spectral gradient is only defined at matrices with distinct,
    /// strictly positive singular values.
    #[error("gradient undefined at non-smooth point: {0}")]
    NonSmoothPoint(String),

    /// Input is degenerate for the requested computation (zero norm, empty set, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A data file could not be parsed.
    #[error("parse error in {path} at line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether this error denotes a numerical failure (as opposed to bad
    /// usage or unreadable input). The CLI maps the two classes to distinct
    /// exit codes.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite(_)
                | Error::Linalg(_)
                | Error::Divergence { .. }
                | Error::NonSmoothPoint(_)
                | Error::Degenerate(_)
        )
    }
}
