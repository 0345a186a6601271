use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension d = {0} is not supported (need d >= 3)")]
    UnsupportedDimension(i64),

    #[error("quadrature did not converge on [{lo}, {hi}]: estimate {value:e} with error {error:e} after {subdivisions} subdivisions")]
    QuadratureNonConvergence {
        lo: f64,
        hi: f64,
        value: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("no sign change of Q found in (0, {0})")]
    NoSignChange(f64),

    #[error("eigensolver failure: {0}")]
    Eigen(String),

    #[error("evolution diverged at tau = {tau}: sup |psi| = {sup:e}")]
    Divergence { tau: f64, sup: f64 },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
