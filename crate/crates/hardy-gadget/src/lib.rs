//! The 01-gadget Hardy test in local dimension four.
//!
//! Vectors live in `ℚ(√3)⁴` and every orthogonality, faithfulness and
//! probability check is an exact equality. Four rotated copies of the
//! 15-vertex gadget give the measurement bases of a Hardy paradox for the
//! maximally entangled pair of ququarts.

pub mod compile;
pub mod graph;
pub mod rotate;
pub mod scalar;

pub use compile::{compile_hardy_test, lhv_search, quantum_behavior, quantum_verify, CompiledHardyTest, QuantumReport};
pub use graph::{build_gadget15, verify_gadget_coloring, ColoringReport, GadgetGraph};
pub use rotate::{rotate_copies, RotatedGadget};
pub use scalar::QSqrt3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GadgetError {
    #[error("vertex {0} carries the zero vector")]
    ZeroVector(usize),
    #[error("vertices {0} and {1} carry parallel vectors")]
    NotFaithful(usize, usize),
    #[error("distinguished vertices {0} and {1} are adjacent")]
    DistinguishedAdjacent(usize, usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("exhaustive coloring search over {vertices} vertices exceeds the bound of {max}")]
    SearchBoundExceeded { vertices: usize, max: usize },
    #[error("orthogonality check failed: {0}")]
    OrthogonalityFailure(String),
    #[error("clique completion failed: {0}")]
    CliqueCompletionFailure(String),
    #[error("search exceeded the cap of {0} nodes")]
    CapExceeded(u64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Core(#[from] hardy_core::HardyError),
}

impl GadgetError {
    pub fn code(&self) -> &'static str {
        match self {
            GadgetError::ZeroVector(_) => "ZeroVector",
            GadgetError::NotFaithful(..) => "NotFaithful",
            GadgetError::DistinguishedAdjacent(..) => "DistinguishedAdjacent",
            GadgetError::DimensionMismatch(_) => "DimensionMismatch",
            GadgetError::SearchBoundExceeded { .. } => "SearchBoundExceeded",
            GadgetError::OrthogonalityFailure(_) => "OrthogonalityFailure",
            GadgetError::CliqueCompletionFailure(_) => "CliqueCompletionFailure",
            GadgetError::CapExceeded(_) => "CapExceeded",
            GadgetError::Parse(_) => "ParseError",
            GadgetError::Core(e) => e.code(),
        }
    }
}

pub type Result<T> = std::result::Result<T, GadgetError>;
