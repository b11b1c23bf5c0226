//! Error taxonomy shared across the toolkit.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not positive (semi)definite: {0}")]
    NotPositiveDefinite(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("closed loop is unstable: {0}")]
    Unstable(String),
    #[error("gain does not stabilize the delay-free loop")]
    NotDelayFreeStable,
    #[error("singular Lyapunov operator (eigenvalue pair sums to ~0)")]
    SingularLyapunov,
    #[error("conjugate gradient did not converge (residual {residual:.3e})")]
    CgNonConvergence { residual: f64 },
    #[error("constraint system infeasible: {0}")]
    Infeasible(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("relaxation step infeasible at current (gamma, eta)")]
    StepInfeasible,
    #[error("no stabilizing pair found: {0}")]
    NoStabilizingPair(String),
    #[error("line search lost closed-loop stability")]
    LostStability,
    #[error("no stable delay interval at or right of the target delay")]
    NoStableInterval,
    #[error("mixed-integer program infeasible: {0}")]
    MiqpInfeasible(String),
    #[error("enumeration cap exceeded ({0} combinations)")]
    CapExceeded(usize),
    #[error("configuration error: {0}")]
    ConfigError(String),
}

impl Error {
    /// Stable machine-readable category name, used for CLI exit codes.
    pub fn category(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NotPositiveDefinite(_) => "NotPositiveDefinite",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Unstable(_) => "Unstable",
            Error::NotDelayFreeStable => "NotDelayFreeStable",
            Error::SingularLyapunov => "SingularLyapunov",
            Error::CgNonConvergence { .. } => "CgNonConvergence",
            Error::Infeasible(_) => "Infeasible",
            Error::NumericalFailure(_) => "NumericalFailure",
            Error::StepInfeasible => "StepInfeasible",
            Error::NoStabilizingPair(_) => "NoStabilizingPair",
            Error::LostStability => "LostStability",
            Error::NoStableInterval => "NoStableInterval",
            Error::MiqpInfeasible(_) => "MiqpInfeasible",
            Error::CapExceeded(_) => "CapExceeded",
            Error::ConfigError(_) => "ConfigError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
