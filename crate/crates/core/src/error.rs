use thiserror::Error;

/// Errors raised by the index machinery.
///
/// Diagnostics carry the parameter value at which the numerics gave up so a
/// failing instance can be reproduced directly.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error(
        "non-regular crossing at t = {t:.12}: smallest crossing-form eigenvalue {min_eig:.3e}"
    )]
    NonRegularCrossing { t: f64, min_eig: f64 },

    #[error("path refinement budget exhausted near t = {t:.12}")]
    RefinementExhausted { t: f64 },

    #[error("winding count not integral ({value:.6}) after refinement")]
    NonIntegralWinding { value: f64 },

    #[error("transversality violated at t = {t:.12} (intersection dimension {dim})")]
    TransversalityViolated { t: f64, dim: usize },

    #[error("rank-deficient constraint system (smallest singular value {sigma:.3e})")]
    RankDeficient { sigma: f64 },

    #[error("integrator failure on [{from:.6}, {to:.6}]: {reason}")]
    Integrator { from: f64, to: f64, reason: String },

    #[error("root isolation failed near lambda = {lambda:.9}")]
    RootIsolation { lambda: f64 },

    #[error("eigenvalue tracking ambiguous on t in [{t0:.9}, {t1:.9}]")]
    TrackingAmbiguous { t0: f64, t1: f64 },

    #[error("unique continuation violated: trace map singular value {sigma:.3e}")]
    UniqueContinuation { sigma: f64 },

    #[error("search exceeded dimension bound {bound}")]
    SearchExhausted { bound: usize },

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
