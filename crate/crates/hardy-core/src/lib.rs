//! Tilted Hardy tests of quantum nonlocality.
//!
//! Bell functionals and classical bounds ([`bell`]), the tilted Hardy test
//! and its optimal strategies ([`tilted`]), the colored-noise guessing
//! curve ([`colored`]), the correlator expression `I_w` ([`iw`]), the
//! ladder generalization ([`ladder`]) and no-signalling adversaries
//! ([`nosignaling`]).

pub mod bell;
pub mod colored;
pub mod error;
pub mod iw;
pub mod ladder;
pub mod nosignaling;
pub mod numeric;
pub mod quantum;
pub mod tilted;

pub use error::{HardyError, Result};
