//! Level-2 NPA relaxations for the tilted Hardy scenario.
//!
//! Bipartite programs bound the quantum value of a Bell functional; the
//! tripartite ones add an eavesdropper with a single four-outcome
//! measurement and bound her probability of guessing both outcomes.

use openblas_src as _;

pub mod monomial;
pub mod problem;
pub mod programs;
pub mod sdpa;
pub mod solver;

pub use problem::{build_npa2, MomentProblem, NpaScenario};
pub use programs::{guess_prob_vs_iw, max_functional_q2, mdl_rate_curve, HRule};
pub use solver::{solver_from_env, ClarabelSolver, SdpResult, SdpSolver, SdpStatus};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NpaError {
    #[error("unsupported scenario: {0}")]
    UnsupportedScenario(String),
    #[error("moment {0} is not represented in the relaxation")]
    MissingMoment(String),
    #[error("the relaxation is infeasible")]
    Infeasible,
    #[error("solver error: {0}")]
    Solver(String),
    #[error("unknown solver backend {0:?}")]
    UnsupportedSolver(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("malformed SDPA input: {0}")]
    Parse(String),
    #[error(transparent)]
    Core(#[from] hardy_core::HardyError),
}

impl NpaError {
    pub fn code(&self) -> &'static str {
        match self {
            NpaError::UnsupportedScenario(_) => "UnsupportedScenario",
            NpaError::MissingMoment(_) => "MissingMoment",
            NpaError::Infeasible => "Infeasible",
            NpaError::Solver(_) => "SolverError",
            NpaError::UnsupportedSolver(_) => "UnsupportedSolver",
            NpaError::Io(_) => "IoError",
            NpaError::Parse(_) => "ParseError",
            NpaError::Core(e) => e.code(),
        }
    }
}

pub type Result<T> = std::result::Result<T, NpaError>;
