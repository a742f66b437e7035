use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid APES parameters: {0}")]
    InvalidApes(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operator/basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("matrix is not Hermitian (relative defect {defect:.3e})")]
    NonHermitian { defect: f64 },

    #[error("doublet identification failed: {0}")]
    Doublet(String),

    #[error("fit did not converge after {iterations} iterations (best cost {best_cost:.3e})")]
    NotConverged {
        iterations: usize,
        best_cost: f64,
        best: Box<crate::fitting::FitResult>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("dataset error (line {line}): {msg}")]
    Dataset { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonHermitian { .. } | Error::Doublet(_) | Error::NotConverged { .. }
        )
    }
}
