use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("calibration failed: no {quantity} in [{lo}, {hi}] reaches probability {target}")]
    Calibration {
        quantity: &'static str,
        lo: f64,
        hi: f64,
        target: f64,
    },

    #[error("{method} did not converge after {iterations} iterations (last residual {residual:e})")]
    Convergence {
        method: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error(
        "fairness constraint infeasible at prefix {prefix}: needs {required} protected, only {available} available"
    )]
    Infeasible {
        prefix: usize,
        required: usize,
        available: usize,
    },

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("trial {trial}, iteration {iteration}: {source}")]
    Trial {
        trial: usize,
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for errors caused by bad user input rather than by a failed computation.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::InvalidInput(_) | Error::Config(_) | Error::Parse { .. } => true,
            Error::Trial { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
