use thiserror::Error;

/// Errors raised by the numerical kernels, the learners and the harness.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Malformed arguments: dimension mismatch, out-of-domain values, ...
    #[error("invalid input: {0}")]
    Input(String),

    /// An iterative solver stopped before reaching its tolerance.
    #[error("{solver} did not converge: best value {best_value:.6e}, residual {residual:.3e}")]
    Solver { solver: &'static str, best_value: f64, residual: f64, iterate: Vec<f64> },

    /// The requested operation is not available for this representation.
    #[error("unsupported: {0}")]
    Capability(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    /// A run was stopped because the oracle slack exceeded its hard limit.
    #[error("run aborted at step {step}: oracle slack {nu:.3e} exceeds limit {limit:.3e}")]
    SlackLimit { step: usize, nu: f64, limit: f64 },

    /// Config parse or validation failure; the message names the field.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn capability(msg: impl Into<String>) -> Self {
        Error::Capability(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(what: &str, got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(Error::input(format!("{what}: dimension {got} does not match expected {expected}")));
    }
    Ok(())
}
