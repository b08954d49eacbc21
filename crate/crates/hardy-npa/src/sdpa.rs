//! Sparse SDPA (`.dat-s`) export and import.
//!
//! The primal form is `min Σ c_i x_i` subject to `Σ_i F_i x_i - F_0 ⪰ 0`.
//! Block 1 holds the moment matrix; linear constraints go into a diagonal
//! block, with each equality written as a pair of inequalities.

use std::fmt::Write as _;
use std::path::Path;

use clarabel::solver::{NonnegativeConeT, PSDTriangleConeT};
use serde::{Deserialize, Serialize};

use crate::problem::{ConstraintKind, MomentProblem, Sense};
use crate::solver::{classify, run_clarabel, svec_index, ClarabelSolver, ConicData, SdpStatus};
use crate::{NpaError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdpaEntry {
    pub matrix: usize,
    pub block: usize,
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpaProblem {
    /// Sense of the original problem; the file itself always minimizes.
    pub sense: Sense,
    /// Constant term of the original objective.
    pub offset: f64,
    /// Negative sizes denote diagonal blocks.
    pub block_sizes: Vec<i64>,
    pub c: Vec<f64>,
    pub entries: Vec<SdpaEntry>,
}

impl SdpaProblem {
    pub fn from_problem(p: &MomentProblem) -> Self {
        let m = p.moments.len() - 1;
        let sign = if p.sense == Sense::Maximize { -1.0 } else { 1.0 };
        let mut c = vec![0.0; m];
        for &(k, v) in &p.objective.terms {
            if k > 0 {
                c[k - 1] += sign * v;
            }
        }
        let mut entries = Vec::new();
        let n = p.size();
        for i in 0..n {
            for j in i..n {
                match p.cell(i, j) {
                    Some(0) => entries.push(SdpaEntry { matrix: 0, block: 1, i: i + 1, j: j + 1, value: -1.0 }),
                    Some(k) => entries.push(SdpaEntry { matrix: k, block: 1, i: i + 1, j: j + 1, value: 1.0 }),
                    None => {}
                }
            }
        }
        let mut row = 0;
        for con in &p.constraints {
            let signs: &[f64] = match con.kind {
                ConstraintKind::Ge => &[1.0],
                ConstraintKind::Le => &[-1.0],
                ConstraintKind::Eq => &[1.0, -1.0],
            };
            for &s in signs {
                row += 1;
                for &(k, v) in &con.expr.terms {
                    if k > 0 && v != 0.0 {
                        entries.push(SdpaEntry { matrix: k, block: 2, i: row, j: row, value: s * v });
                    }
                }
                let f0 = s * (con.rhs - con.expr.constant());
                if f0 != 0.0 {
                    entries.push(SdpaEntry { matrix: 0, block: 2, i: row, j: row, value: f0 });
                }
            }
        }
        let mut block_sizes = vec![n as i64];
        if row > 0 {
            block_sizes.push(-(row as i64));
        }
        SdpaProblem { sense: p.sense, offset: p.objective.constant(), block_sizes, c, entries }
    }

    pub fn to_sdpa_string(&self) -> String {
        let mut s = String::new();
        let sense = match self.sense {
            Sense::Maximize => "max",
            Sense::Minimize => "min",
        };
        let _ = writeln!(s, "* level-2 moment relaxation");
        let _ = writeln!(s, "* sense {sense}");
        let _ = writeln!(s, "* objective-constant {:e}", self.offset);
        let _ = writeln!(s, "{}", self.c.len());
        let _ = writeln!(s, "{}", self.block_sizes.len());
        let sizes: Vec<String> = self.block_sizes.iter().map(|b| b.to_string()).collect();
        let _ = writeln!(s, "{}", sizes.join(" "));
        let c: Vec<String> = self.c.iter().map(|v| format!("{v:e}")).collect();
        let _ = writeln!(s, "{}", c.join(" "));
        for e in &self.entries {
            let _ = writeln!(s, "{} {} {} {} {:e}", e.matrix, e.block, e.i, e.j, e.value);
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut sense = Sense::Minimize;
        let mut offset = 0.0;
        let mut body = Vec::new();
        for line in text.lines() {
            let t = line.trim();
            if let Some(rest) = t.strip_prefix('*').or_else(|| t.strip_prefix('"')) {
                let rest = rest.trim();
                if let Some(v) = rest.strip_prefix("sense ") {
                    sense = if v.trim() == "max" { Sense::Maximize } else { Sense::Minimize };
                } else if let Some(v) = rest.strip_prefix("objective-constant ") {
                    offset = parse_f64(v)?;
                }
            } else if !t.is_empty() {
                body.push(t);
            }
        }
        let mut tokens = body.iter().flat_map(|l| l.split(|c: char| c.is_whitespace() || "{},()".contains(c)));
        let mut next = || tokens.by_ref().find(|t| !t.is_empty()).ok_or_else(|| NpaError::Parse("truncated file".into()));
        let m: usize = parse_int(next()?)?;
        let nblocks: usize = parse_int(next()?)?;
        let block_sizes = (0..nblocks).map(|_| next().and_then(parse_int)).collect::<Result<Vec<i64>>>()?;
        let c = (0..m).map(|_| next().and_then(parse_f64)).collect::<Result<Vec<f64>>>()?;
        let mut entries = Vec::new();
        let rest: Vec<&str> = tokens.filter(|t| !t.is_empty()).collect();
        if rest.len() % 5 != 0 {
            return Err(NpaError::Parse("entry lines need five fields".into()));
        }
        for chunk in rest.chunks(5) {
            entries.push(SdpaEntry {
                matrix: parse_int(chunk[0])?,
                block: parse_int(chunk[1])?,
                i: parse_int(chunk[2])?,
                j: parse_int(chunk[3])?,
                value: parse_f64(chunk[4])?,
            });
        }
        Ok(SdpaProblem { sense, offset, block_sizes, c, entries })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_sdpa_string()).map_err(|e| NpaError::Io(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| NpaError::Io(e.to_string()))?;
        SdpaProblem::parse(&text)
    }

    /// Solves the file as written and returns the value in the sense of the
    /// original problem.
    pub fn solve(&self, cfg: &ClarabelSolver) -> Result<(f64, SdpStatus)> {
        let m = self.c.len();
        let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
        let mut b = Vec::new();
        let mut cones = Vec::new();
        for (bi, &size) in self.block_sizes.iter().enumerate() {
            let block = bi + 1;
            let (dim, diag) = if size < 0 { ((-size) as usize, true) } else { (size as usize, false) };
            let len = if diag { dim } else { dim * (dim + 1) / 2 };
            let base = rows.len();
            rows.resize(base + len, Vec::new());
            b.resize(base + len, 0.0);
            for e in self.entries.iter().filter(|e| e.block == block) {
                let (i, j) = (e.i.min(e.j) - 1, e.i.max(e.j) - 1);
                if diag && i != j {
                    return Err(NpaError::Parse("off-diagonal entry in a diagonal block".into()));
                }
                let (r, scale) = if diag {
                    (base + i, 1.0)
                } else {
                    (base + svec_index(i, j), if i == j { 1.0 } else { std::f64::consts::SQRT_2 })
                };
                // s = Σ F_i x_i - F_0 = b - A x.
                if e.matrix == 0 {
                    b[r] -= scale * e.value;
                } else if e.matrix <= m {
                    rows[r].push((e.matrix - 1, -scale * e.value));
                } else {
                    return Err(NpaError::Parse(format!("matrix index {} exceeds {m}", e.matrix)));
                }
            }
            cones.push(if diag { NonnegativeConeT(dim) } else { PSDTriangleConeT(dim) });
        }
        let data = ConicData { c: self.c.clone(), rows, b, cones, nvars: m };
        let sol = run_clarabel(&data, cfg)?;
        let (status, _) = classify(&sol);
        let value = match self.sense {
            Sense::Maximize => -sol.obj + self.offset,
            Sense::Minimize => sol.obj + self.offset,
        };
        Ok((value, status))
    }
}

fn parse_int<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.parse().map_err(|_| NpaError::Parse(format!("expected an integer, got {s:?}")))
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| NpaError::Parse(format!("expected a number, got {s:?}")))
}

pub fn export_sdpa(p: &MomentProblem, path: &Path) -> Result<SdpaProblem> {
    let sdpa = SdpaProblem::from_problem(p);
    sdpa.write(path)?;
    Ok(sdpa)
}
