//! Run configuration and the on-disk artifact formats.
//!
//! JSON artifacts are an [`Envelope`]. CSV artifacts start with one comment
//! line `# {"schema_version":..,"config":..}` followed by a header row.

use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use hardy_npa::ClarabelSolver;
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::{CertError, Result, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub backend: String,
    pub tol_gap: f64,
    pub tol_feas: f64,
    pub max_iter: u32,
    pub regularization: f64,
}

impl SolverConfig {
    /// Reads the backend from `HARDY_CERT_SOLVER`; only the native conic
    /// solver is available.
    pub fn from_env(tol: f64, max_iter: u32) -> Result<Self> {
        let backend = std::env::var("HARDY_CERT_SOLVER").unwrap_or_default();
        let backend = if backend.is_empty() { "clarabel".to_string() } else { backend };
        if backend != "clarabel" {
            return Err(hardy_npa::NpaError::UnsupportedSolver(backend).into());
        }
        let d = ClarabelSolver::default();
        Ok(SolverConfig { backend, tol_gap: tol, tol_feas: tol, max_iter, regularization: d.regularization })
    }

    pub fn solver(&self) -> ClarabelSolver {
        ClarabelSolver {
            tol_gap: self.tol_gap,
            tol_feas: self.tol_feas,
            max_iter: self.max_iter,
            regularization: self.regularization,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub tool_version: String,
    pub command: String,
    /// The subcommand's flags as parsed.
    pub args: serde_json::Value,
    pub solver: SolverConfig,
    /// Seed for multi-start optimizers.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema_version: u32,
    pub config: RunConfig,
    pub result: T,
}

impl<T> Envelope<T> {
    pub fn new(config: RunConfig, result: T) -> Self {
        Envelope { schema_version: SCHEMA_VERSION, config, result }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CsvMeta {
    schema_version: u32,
    config: RunConfig,
}

pub fn write_json<T: Serialize>(path: &Path, env: &Envelope<T>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(env)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_json_artifact<T: DeserializeOwned>(path: &Path) -> Result<Envelope<T>> {
    let text = std::fs::read_to_string(path)?;
    let env: Envelope<T> = serde_json::from_str(&text)?;
    check_version(env.schema_version)?;
    Ok(env)
}

fn check_version(v: u32) -> Result<()> {
    if v != SCHEMA_VERSION {
        return Err(CertError::Artifact(format!("schema version {v}, expected {SCHEMA_VERSION}")));
    }
    Ok(())
}

/// Writes serializable rows under the metadata line; the header comes from
/// the row type's field names.
pub fn write_csv<R: Serialize>(path: &Path, config: &RunConfig, rows: &[R]) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    let meta = CsvMeta { schema_version: SCHEMA_VERSION, config: config.clone() };
    writeln!(file, "# {}", serde_json::to_string(&meta)?)?;
    let mut w = csv::Writer::from_writer(file);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvArtifact {
    pub schema_version: u32,
    pub config: RunConfig,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvArtifact {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// A column parsed as numbers; empty cells become NaN.
    pub fn numbers(&self, name: &str) -> Result<Vec<f64>> {
        let c = self.column(name).ok_or_else(|| CertError::Artifact(format!("no column {name:?}")))?;
        self.rows
            .iter()
            .map(|r| {
                if r[c].is_empty() {
                    Ok(f64::NAN)
                } else {
                    r[c].parse().map_err(|_| CertError::Artifact(format!("{name}: {:?} is not a number", r[c])))
                }
            })
            .collect()
    }

    pub fn records<R: DeserializeOwned>(&self) -> Result<Vec<R>> {
        let header = csv::StringRecord::from(self.header.clone());
        self.rows
            .iter()
            .map(|r| Ok(csv::StringRecord::from(r.clone()).deserialize(Some(&header))?))
            .collect()
    }
}

pub fn read_csv_artifact(path: &Path) -> Result<CsvArtifact> {
    let file = std::fs::File::open(path)?;
    let mut first = String::new();
    BufReader::new(&file).read_line(&mut first)?;
    let meta_text = first
        .strip_prefix("# ")
        .ok_or_else(|| CertError::Artifact("missing metadata line".into()))?;
    let meta: CsvMeta = serde_json::from_str(meta_text.trim_end())?;
    check_version(meta.schema_version)?;
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
    let header = r.headers()?.iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(String::from).collect()))
        .collect::<std::result::Result<Vec<Vec<String>>, _>>()?;
    Ok(CsvArtifact { schema_version: meta.schema_version, config: meta.config, header, rows })
}

/// Creates `dir` if needed and returns `dir/name`.
pub fn in_dir(dir: &Path, name: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    Ok(dir.join(name))
}
