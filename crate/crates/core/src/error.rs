use thiserror::Error;

/// Errors raised by the analytic engines, the Monte Carlo oracle and the
/// datasheet loader.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{func}: argument outside domain ({detail})")]
    Domain { func: &'static str, detail: String },

    #[error("integration did not converge: estimate {estimate:e}, error bound {error_bound:e}")]
    Integration { estimate: f64, error_bound: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("estimator failure: {0}")]
    Estimator(String),

    #[error("not available: {0}")]
    NotAvailable(String),

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        func,
        detail: detail.into(),
    }
}
