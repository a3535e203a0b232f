use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("discretization error: {0}")]
    Discretization(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("series did not converge: achieved tail bound {achieved:e} with {modes} modes")]
    Convergence { achieved: f64, modes: usize },
    #[error("ground-state fit residual {residual:e} exceeds tolerance")]
    Fit { residual: f64 },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
