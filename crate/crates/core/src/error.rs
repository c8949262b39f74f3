use thiserror::Error;

/// Errors raised by the numerical kernels, the oracles and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("convergence failure: {0}")]
    Convergence(String),

    #[error("accuracy error: {0}")]
    Accuracy(String),

    #[error("state is not normalizable (Re l = {re_l})")]
    NonNormalizable { re_l: f64 },

    #[error("overlap integral diverges (Re(1 + l) = {0})")]
    Divergence(f64),

    #[error("branch tracking failed near t = {t}: phase step too large")]
    BranchStep { t: f64 },

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("grid resolution error: {0}")]
    Resolution(String),

    #[error("stability error: {0}")]
    Stability(String),

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
