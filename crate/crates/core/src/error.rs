use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside the domain of the formula or model.
    #[error("invalid `{field}`: {reason}")]
    Domain { field: String, reason: String },

    #[error("Hilbert space dimension {dimension} exceeds cap {cap}")]
    DimensionCap { dimension: u128, cap: usize },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("time step rejected at t = {time}: local error estimate {estimate:e} exceeds {threshold:e}")]
    StepRejected { time: f64, estimate: f64, threshold: f64 },

    #[error("ground state is degenerate at t = {time} (gap {gap:e}); adiabatic criterion undefined")]
    DegenerateGap { time: f64, gap: f64 },

    #[error("sector decomposition requires the charge axis to be z")]
    UnsupportedAxis,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Domain {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
