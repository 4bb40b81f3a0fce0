use thiserror::Error;

/// Errors raised by the numerical routines and the file loaders.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("logarithm is ambiguous: eigenvalue within {distance:.3e} of -1")]
    BranchCut { distance: f64 },

    #[error("element is not in the identity component")]
    NotInIdentityComponent,

    #[error("matrix is rank deficient (smallest singular value {sigma_min:.3e})")]
    SingularProjection { sigma_min: f64 },

    #[error("no centralizer decision for {group}: {detail}")]
    UnsupportedGroup { group: String, detail: String },

    #[error("ambiguous rank in {context}: singular value {sigma:.3e} is within a factor 10 of the cutoff {cutoff:.3e}")]
    RankAmbiguity {
        context: &'static str,
        sigma: f64,
        cutoff: f64,
    },

    #[error("solver did not converge (final residual {final_residual:.3e})")]
    NoConvergence { final_residual: f64 },

    #[error("symplectic form is degenerate at a nonsingular point (sigma_min {sigma_min:.3e}, sigma_max {sigma_max:.3e})")]
    DegenerateForm { sigma_min: f64, sigma_max: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
