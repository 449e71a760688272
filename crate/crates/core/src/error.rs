use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("internal error: {0}")]
    Internal(String),

    /// Non-finite values appeared after a time step.
    #[error("numerical divergence at t = {t} (dt = {dt})")]
    Divergence { t: f64, dt: f64 },

    /// An ensemble member failed; `index` identifies the member.
    #[error("ensemble member {index} failed: {source}")]
    Member {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    /// A parameter-sweep row failed.
    #[error("sweep row (nu = {nu}, sigma = {sigma}) failed: {source}")]
    Sweep {
        nu: f64,
        sigma: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("degenerate pair: initial separation is zero")]
    DegeneratePair,

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("configuration error: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Innermost error, looking through ensemble and sweep wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Member { source, .. } | Error::Sweep { source, .. } => source.root(),
            other => other,
        }
    }
}
