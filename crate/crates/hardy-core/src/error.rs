use thiserror::Error;

pub type Result<T, E = HardyError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HardyError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("invalid behavior: {0}")]
    InvalidBehavior(String),

    #[error("strategy space of {count} deterministic boxes exceeds the cap of {cap}")]
    CapExceeded { count: u128, cap: u64 },

    #[error("degenerate reduction: the P(0,0) coefficient vanishes after removing the offset")]
    DegenerateReduction,

    #[error("optimizer did not converge: {0}")]
    NonConvergence(String),

    #[error("root not bracketed on [{lo}, {hi}]")]
    RootNotBracketed { lo: f64, hi: f64 },

    #[error("closed form is singular at w = {0}; use the numeric route")]
    SingularW(f64),

    #[error("joint distribution is not normalized (total mass {0})")]
    NotNormalized(f64),

    #[error("linear program is infeasible: {0}")]
    Infeasible(String),

    #[error("numerical routine failed: {0}")]
    Numerical(String),
}

impl HardyError {
    /// Stable machine-readable identifier, used by the CLI error JSON.
    pub fn code(&self) -> &'static str {
        match self {
            HardyError::DimensionMismatch(_) => "DimensionMismatch",
            HardyError::OutOfRange(_) => "OutOfRange",
            HardyError::InvalidBehavior(_) => "InvalidBehavior",
            HardyError::CapExceeded { .. } => "CapExceeded",
            HardyError::DegenerateReduction => "DegenerateReduction",
            HardyError::NonConvergence(_) => "NonConvergence",
            HardyError::RootNotBracketed { .. } => "RootNotBracketed",
            HardyError::SingularW(_) => "SingularW",
            HardyError::NotNormalized(_) => "NotNormalized",
            HardyError::Infeasible(_) => "Infeasible",
            HardyError::Numerical(_) => "Numerical",
        }
    }
}

impl From<argmin::core::Error> for HardyError {
    fn from(e: argmin::core::Error) -> Self {
        HardyError::Numerical(e.to_string())
    }
}
