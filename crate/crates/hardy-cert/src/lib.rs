//! Command-line front end for the tilted Hardy toolkit: argument parsing,
//! run configuration and the JSON/CSV artifacts every command emits.

pub mod artifact;
pub mod cli;
pub mod commands;

use hardy_core::HardyError;
use hardy_gadget::GadgetError;
use hardy_npa::NpaError;
use serde::Serialize;

pub use artifact::{read_csv_artifact, read_json_artifact, CsvArtifact, Envelope, RunConfig, SolverConfig};

/// Version of the artifact layout, written into every output.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CertError {
    #[error(transparent)]
    Core(#[from] HardyError),
    #[error(transparent)]
    Npa(#[from] NpaError),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("malformed artifact: {0}")]
    Artifact(String),
    #[error("invalid arguments: {0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

impl From<std::io::Error> for CertError {
    fn from(e: std::io::Error) -> Self {
        CertError::Io(e.to_string())
    }
}

impl From<csv::Error> for CertError {
    fn from(e: csv::Error) -> Self {
        CertError::Artifact(e.to_string())
    }
}

impl From<serde_json::Error> for CertError {
    fn from(e: serde_json::Error) -> Self {
        CertError::Artifact(e.to_string())
    }
}

impl CertError {
    pub fn code(&self) -> &'static str {
        match self {
            CertError::Core(e) => e.code(),
            CertError::Npa(e) => e.code(),
            CertError::Gadget(e) => e.code(),
            CertError::Io(_) => "IoError",
            CertError::Artifact(_) => "ArtifactError",
            CertError::Usage(_) => "UsageError",
            CertError::VerificationFailed(_) => "VerificationFailed",
        }
    }

    /// 1 when a check ran and failed, 2 for every other error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CertError::VerificationFailed(_) => 1,
            _ => 2,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct ErrorJson<'a> {
            schema_version: u32,
            error: &'a str,
            message: String,
        }
        serde_json::to_value(ErrorJson { schema_version: SCHEMA_VERSION, error: self.code(), message: self.to_string() })
            .expect("plain struct")
    }
}

pub type Result<T> = std::result::Result<T, CertError>;
