use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported matrix market format: {0}")]
    UnsupportedFormat(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("shift {sigma} is (numerically) a generalized eigenvalue")]
    ShiftIsEigenvalue { sigma: Complex64 },

    #[error("reduced Hessenberg system is singular at z = {z}")]
    ReducedSingular { z: Complex64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("shift budget of {budget} Krylov bases exhausted{}", region.as_ref().map(|r| format!(" while testing region {r}")).unwrap_or_default())]
    ShiftBudgetExceeded { budget: usize, region: Option<String> },

    #[error("could not build a Krylov basis near {sigma} after repeated perturbation")]
    ShiftConstructionFailed { sigma: Complex64 },

    #[error("shift cache is empty")]
    CacheEmpty,

    #[error("shift cache holds bases for a different right-hand side")]
    ForeignRhs,

    #[error("eigenvalue {eigenvalue} lies on the contour")]
    OnContour { eigenvalue: Complex64 },

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
