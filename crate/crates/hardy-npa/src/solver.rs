//! Solver interface and the native conic backend.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettings, DefaultSolver, IPSolver, NonnegativeConeT, PSDTriangleConeT, SolverStatus, SupportedConeT,
    ZeroConeT,
};
use serde::{Deserialize, Serialize};

use crate::problem::{ConstraintKind, MomentProblem, Sense};
use crate::{NpaError, Result};

/// Relative primal/dual gap below which a solve counts as optimal.
pub const OPTIMAL_GAP: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SdpStatus {
    Optimal,
    NearOptimal,
    Infeasible,
    SolverError,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpResult {
    pub value: f64,
    pub status: SdpStatus,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub relative_gap: f64,
    /// Optimal moments, identity first.
    #[serde(skip)]
    pub moments: Vec<f64>,
}

impl SdpResult {
    /// The value, or an error if the solve did not produce one.
    pub fn checked(self) -> Result<Self> {
        match self.status {
            SdpStatus::Optimal | SdpStatus::NearOptimal => Ok(self),
            SdpStatus::Infeasible => Err(NpaError::Infeasible),
            SdpStatus::SolverError => Err(NpaError::Solver("no usable solution".into())),
        }
    }
}

pub trait SdpSolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, problem: &MomentProblem) -> Result<SdpResult>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClarabelSolver {
    pub tol_gap: f64,
    pub tol_feas: f64,
    pub max_iter: u32,
    /// Static KKT regularization. Guessing programs at maximal violation
    /// have no interior and stall with the library default.
    pub regularization: f64,
}

impl Default for ClarabelSolver {
    fn default() -> Self {
        ClarabelSolver { tol_gap: 1e-9, tol_feas: 1e-9, max_iter: 500, regularization: 1e-7 }
    }
}

/// Conic data `min c'x` subject to `Ax + s = b`, `s` in the listed cones.
pub(crate) struct ConicData {
    pub c: Vec<f64>,
    pub rows: Vec<Vec<(usize, f64)>>,
    pub b: Vec<f64>,
    pub cones: Vec<SupportedConeT<f64>>,
    pub nvars: usize,
}

impl ConicData {
    fn matrix(&self) -> CscMatrix<f64> {
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.nvars];
        for (r, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                if v != 0.0 {
                    cols[j].push((r, v));
                }
            }
        }
        let mut colptr = vec![0];
        let mut rowval = Vec::new();
        let mut nzval = Vec::new();
        for col in cols.iter_mut() {
            col.sort_by_key(|e| e.0);
            // Merge duplicate rows within a column.
            let mut last: Option<usize> = None;
            for &(r, v) in col.iter() {
                if last == Some(r) {
                    *nzval.last_mut().expect("entry pushed") += v;
                } else {
                    rowval.push(r);
                    nzval.push(v);
                    last = Some(r);
                }
            }
            colptr.push(rowval.len());
        }
        CscMatrix::new(self.rows.len(), self.nvars, colptr, rowval, nzval)
    }
}

/// Column-major upper-triangle position of `(i, j)`, `i <= j`.
pub(crate) fn svec_index(i: usize, j: usize) -> usize {
    j * (j + 1) / 2 + i
}

pub(crate) struct ConicSolution {
    pub x: Vec<f64>,
    pub obj: f64,
    pub obj_dual: f64,
    pub status: SolverStatus,
    pub r_prim: f64,
    pub r_dual: f64,
}

pub(crate) fn run_clarabel(data: &ConicData, cfg: &ClarabelSolver) -> Result<ConicSolution> {
    let p = CscMatrix::zeros((data.nvars, data.nvars));
    let a = data.matrix();
    let settings = DefaultSettings {
        verbose: false,
        tol_gap_abs: cfg.tol_gap,
        tol_gap_rel: cfg.tol_gap,
        tol_feas: cfg.tol_feas,
        max_iter: cfg.max_iter,
        static_regularization_constant: cfg.regularization,
        ..DefaultSettings::default()
    };
    let mut solver = DefaultSolver::new(&p, &data.c, &a, &data.b, &data.cones, settings)
        .map_err(|e| NpaError::Solver(format!("{e:?}")))?;
    solver.solve();
    let s = &solver.solution;
    Ok(ConicSolution {
        x: s.x.clone(),
        obj: s.obj_val,
        obj_dual: s.obj_val_dual,
        status: s.status,
        r_prim: s.r_prim,
        r_dual: s.r_dual,
    })
}

pub(crate) fn classify(sol: &ConicSolution) -> (SdpStatus, f64) {
    let gap = (sol.obj - sol.obj_dual).abs() / (1.0 + sol.obj.abs().max(sol.obj_dual.abs()));
    let status = match sol.status {
        SolverStatus::Solved if gap < OPTIMAL_GAP => SdpStatus::Optimal,
        SolverStatus::Solved | SolverStatus::AlmostSolved => SdpStatus::NearOptimal,
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => SdpStatus::Infeasible,
        _ => SdpStatus::SolverError,
    };
    (status, gap)
}

fn conic_data(problem: &MomentProblem) -> ConicData {
    // Variables are the moments other than the identity.
    let nvars = problem.moments.len() - 1;
    let sign = match problem.sense {
        Sense::Maximize => -1.0,
        Sense::Minimize => 1.0,
    };
    let mut c = vec![0.0; nvars];
    for &(k, v) in &problem.objective.terms {
        if k > 0 {
            c[k - 1] += sign * v;
        }
    }
    let mut rows = Vec::new();
    let mut b = Vec::new();
    let mut cones = Vec::new();
    let split = |expr: &crate::problem::MomentExpr| -> Vec<(usize, f64)> {
        expr.terms.iter().filter(|(k, _)| *k > 0).map(|&(k, v)| (k - 1, v)).collect()
    };
    let eqs: Vec<_> = problem.constraints.iter().filter(|c| c.kind == ConstraintKind::Eq).collect();
    for con in &eqs {
        rows.push(split(&con.expr));
        b.push(con.rhs - con.expr.constant());
    }
    if !eqs.is_empty() {
        cones.push(ZeroConeT(eqs.len()));
    }
    let ineqs: Vec<_> = problem.constraints.iter().filter(|c| c.kind != ConstraintKind::Eq).collect();
    for con in &ineqs {
        let s = if con.kind == ConstraintKind::Le { 1.0 } else { -1.0 };
        rows.push(split(&con.expr).into_iter().map(|(j, v)| (j, s * v)).collect());
        b.push(s * (con.rhs - con.expr.constant()));
    }
    if !ineqs.is_empty() {
        cones.push(NonnegativeConeT(ineqs.len()));
    }
    // s = svec(Γ) = b - A x with off-diagonal cells scaled by √2.
    let n = problem.size();
    let base = rows.len();
    rows.resize(base + n * (n + 1) / 2, Vec::new());
    b.resize(base + n * (n + 1) / 2, 0.0);
    for j in 0..n {
        for i in 0..=j {
            let r = base + svec_index(i, j);
            let scale = if i == j { 1.0 } else { std::f64::consts::SQRT_2 };
            match problem.cell(i, j) {
                Some(0) => b[r] = scale,
                Some(k) => rows[r].push((k - 1, -scale)),
                None => {}
            }
        }
    }
    cones.push(PSDTriangleConeT(n));
    ConicData { c, rows, b, cones, nvars }
}

impl SdpSolver for ClarabelSolver {
    fn name(&self) -> &'static str {
        "clarabel"
    }

    fn solve(&self, problem: &MomentProblem) -> Result<SdpResult> {
        let data = conic_data(problem);
        let sol = run_clarabel(&data, self)?;
        let (status, gap) = classify(&sol);
        let mut moments = vec![1.0];
        moments.extend_from_slice(&sol.x);
        let value = problem.objective.eval(&moments);
        Ok(SdpResult {
            value,
            status,
            primal_residual: sol.r_prim,
            dual_residual: sol.r_dual,
            relative_gap: gap,
            moments,
        })
    }
}

/// Backend named by `HARDY_CERT_SOLVER`, defaulting to the native one.
pub fn solver_from_env() -> Result<Box<dyn SdpSolver>> {
    match std::env::var("HARDY_CERT_SOLVER").ok().as_deref() {
        None | Some("") | Some("clarabel") => Ok(Box::new(ClarabelSolver::default())),
        Some(other) => Err(NpaError::UnsupportedSolver(other.to_string())),
    }
}
