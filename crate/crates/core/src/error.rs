use thiserror::Error;

/// Errors raised by the diagnostics library.
///
/// Variants split into validation failures (bad input, violated
/// precondition) and numerical-integrity failures (a computed quantity
/// broke an invariant it should hold by construction).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dimension {0} is not a perfect square")]
    NotPerfectSquare(usize),

    #[error("operator is not Hermitian: max deviation {deviation:e} exceeds {tol:e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("matrix is not unitary: max deviation {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("vector or coefficient list not normalized: norm^2 = {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("not a valid state: {0}")]
    NotAState(String),

    #[error("numerical integrity violated: {0}")]
    NumericalIntegrity(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of a computed invariant rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NumericalIntegrity(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
