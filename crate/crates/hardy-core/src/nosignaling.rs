//! Measurement-dependent locality (MDL) expressions under weak seeds, the
//! analytic no-signalling adversary bounds and an LP oracle over the
//! no-signalling polytope of the 2222 scenario.

use microlp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem, Variable};
use serde::{Deserialize, Serialize};

use crate::bell::{
    enumerate_deterministic, hardy_bell_functional, BellFunctional, Behavior, Scenario, HARDY_ZEROS, NORM_TOL,
};
use crate::error::{HardyError, Result};

/// Bounds `l <= P(x,y|λ) <= h` on the input distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedBounds {
    pub l: f64,
    pub h: f64,
    pub epsilon: Option<f64>,
}

impl SeedBounds {
    pub fn new(l: f64, h: f64) -> Result<Self> {
        if !(l > 0.0 && l <= h && h < 1.0) {
            return Err(HardyError::OutOfRange(format!("seed bounds need 0 < l <= h < 1, got l={l}, h={h}")));
        }
        if 4.0 * l > 1.0 + 1e-12 || 4.0 * h < 1.0 - 1e-12 {
            return Err(HardyError::OutOfRange(format!(
                "no input distribution fits between l={l} and h={h}"
            )));
        }
        Ok(SeedBounds { l, h, epsilon: None })
    }

    pub fn uniform() -> Self {
        SeedBounds { l: 0.25, h: 0.25, epsilon: Some(0.0) }
    }

    pub fn lh(&self) -> f64 {
        self.l * self.h
    }
}

/// Seed bounds of an ε-SV source driving both inputs.
pub fn sv_to_lh(epsilon: f64) -> Result<SeedBounds> {
    if !(0.0..0.5).contains(&epsilon) {
        return Err(HardyError::OutOfRange(format!("SV bias {epsilon} is outside [0, 1/2)")));
    }
    Ok(SeedBounds { l: (0.5 - epsilon).powi(2), h: (0.5 + epsilon).powi(2), epsilon: Some(epsilon) })
}

/// Joint distribution `P(a,b,x,y)` over outcomes and inputs, stored in the
/// same dense order as a 2222 behavior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    table: Vec<f64>,
}

impl JointDistribution {
    pub fn new(table: Vec<f64>) -> Result<Self> {
        let s = Scenario::CHSH;
        if table.len() != s.len() {
            return Err(HardyError::DimensionMismatch(format!("joint table has {} entries, expected {}", table.len(), s.len())));
        }
        if let Some(v) = table.iter().find(|v| !v.is_finite() || **v < -NORM_TOL) {
            return Err(HardyError::InvalidBehavior(format!("joint entry {v} is not a probability")));
        }
        let total: f64 = table.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(HardyError::NotNormalized(total));
        }
        Ok(JointDistribution { table })
    }

    /// `P(a,b,x,y) = P(x,y) P(a,b|x,y)` with `inputs[x][y] = P(x,y)`.
    pub fn from_behavior(p: &Behavior, inputs: [[f64; 2]; 2]) -> Result<Self> {
        if p.scenario() != Scenario::CHSH {
            return Err(HardyError::DimensionMismatch("MDL expressions need the 2222 scenario".into()));
        }
        let s = Scenario::CHSH;
        let mut t = vec![0.0; 16];
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        t[s.index(a, b, x, y)] = inputs[x][y] * p.p(a, b, x, y);
                    }
                }
            }
        }
        JointDistribution::new(t)
    }

    pub fn p(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.table[Scenario::CHSH.index(a, b, x, y)]
    }

    pub fn inputs(&self, x: usize, y: usize) -> f64 {
        (0..2).flat_map(|a| (0..2).map(move |b| (a, b))).map(|(a, b)| self.p(a, b, x, y)).sum()
    }
}

/// The tilted MDL expression: `l` times the tilted Hardy term (including
/// `-max(0,w) P(x=0,y=0)`) minus `h` times the three zero terms.
pub fn mdl_value(joint: &JointDistribution, w: f64, bounds: &SeedBounds) -> f64 {
    let hardy = joint.p(0, 0, 0, 0) + w * joint.p(1, 1, 0, 0) - w.max(0.0) * joint.inputs(0, 0);
    let zeros: f64 = HARDY_ZEROS.iter().map(|&(a, b, x, y)| joint.p(a, b, x, y)).sum();
    bounds.l * hardy - bounds.h * zeros
}

/// Vertices of `{q in [l,h]^4 : sum q = 1}`, as `[q00, q01, q10, q11]`.
pub fn input_vertices(bounds: &SeedBounds) -> Vec<[f64; 4]> {
    let mut out: Vec<[f64; 4]> = Vec::new();
    for free in 0..4 {
        for mask in 0..8u32 {
            let mut q = [0.0; 4];
            let mut k = 0;
            for (i, qi) in q.iter_mut().enumerate() {
                if i == free {
                    continue;
                }
                *qi = if mask >> k & 1 == 1 { bounds.h } else { bounds.l };
                k += 1;
            }
            q[free] = 1.0 - q.iter().sum::<f64>();
            if q[free] >= bounds.l - 1e-12 && q[free] <= bounds.h + 1e-12 {
                let dup = out.iter().any(|v| v.iter().zip(&q).all(|(u, w)| (u - w).abs() < 1e-12));
                if !dup {
                    out.push(q);
                }
            }
        }
    }
    out
}

/// Largest MDL value reachable by a deterministic box under any input
/// distribution allowed by the seed. Local models give at most zero.
pub fn mdl_lhv_max(w: f64, bounds: &SeedBounds) -> Result<f64> {
    let s = Scenario::CHSH;
    let mut best = f64::NEG_INFINITY;
    for d in enumerate_deterministic(s)? {
        let beh = d.behavior(s);
        for q in input_vertices(bounds) {
            let joint = JointDistribution::from_behavior(&beh, [[q[0], q[1]], [q[2], q[3]]])?;
            best = best.max(mdl_value(&joint, w, bounds));
        }
    }
    Ok(best)
}

/// Worst-case conditional form: `l²` on the tilted Hardy term (with its
/// `-max(0,w)` offset) and `h²` on the three zero terms.
pub fn tilde_mdl_functional(w: f64, bounds: &SeedBounds) -> BellFunctional {
    let (l2, h2) = (bounds.l * bounds.l, bounds.h * bounds.h);
    let mut f = BellFunctional::zero(Scenario::CHSH)
        .add_joint(0, 0, 0, 0, l2)
        .add_joint(1, 1, 0, 0, l2 * w)
        .add_offset(-l2 * w.max(0.0));
    for &(a, b, x, y) in &HARDY_ZEROS {
        f = f.add_joint(a, b, x, y, -h2);
    }
    f
}

/// Correlator-level threshold `4(tilde_max/(lh) + max(0,w)) - (w-2)`.
pub fn tilde_mdl_threshold(tilde_max: f64, w: f64, bounds: &SeedBounds) -> f64 {
    4.0 * (tilde_max / bounds.lh() + w.max(0.0)) - (w - 2.0)
}

fn check_w(w: f64) -> Result<()> {
    if !(w > -0.25 && w < 1.0) {
        return Err(HardyError::OutOfRange(format!("w = {w} is outside (-1/4, 1)")));
    }
    Ok(())
}

/// Bound on any `P(a,b|x,y)` of a no-signalling box given an observed MDL
/// value `delta`, in the form stated at the MDL level.
pub fn ns_analytic_bound(w: f64, delta: f64, bounds: &SeedBounds) -> Result<f64> {
    check_w(w)?;
    if delta < 0.0 || !delta.is_finite() {
        return Err(HardyError::OutOfRange(format!("delta = {delta} must be a non-negative MDL value")));
    }
    let lh = bounds.lh();
    let b = if w <= 0.0 { 1.0 - delta / (lh * (1.0 + w)) } else { 1.0 - (delta - lh * w) / (lh * (1.0 - w)) };
    Ok(b.clamp(0.0, 1.0))
}

/// The same bound stated at the level of the Hardy Bell quantity `v`.
pub fn ns_hardy_level_bound(w: f64, v: f64) -> Result<f64> {
    check_w(w)?;
    Ok(if w <= 0.0 { 1.0 - v / (1.0 + w) } else { 1.0 - v / (1.0 - w) })
}

/// Entry-specific bounds for `w <= 0`: `(lower, upper)` on `P(a,b|x,y)`.
/// Entries with `a⊕b = xy` lie in `[v/(1+w), 1 - v/(1+w)]`, the others
/// below `1 - 2v/(1+w)`.
pub fn ns_entry_bounds(w: f64, v: f64, a: usize, b: usize, x: usize, y: usize) -> Result<(f64, f64)> {
    check_w(w)?;
    if w > 0.0 {
        return Err(HardyError::OutOfRange("entry bounds are stated for w <= 0".into()));
    }
    let r = v / (1.0 + w);
    Ok(if (a ^ b) == (x & y) { (r, 1.0 - r) } else { (0.0, 1.0 - 2.0 * r) })
}

/// The LP over the 16-dimensional no-signalling polytope with a prescribed
/// value of a Bell functional.
#[derive(Debug, Clone)]
pub struct NsLpProblem {
    pub functional: BellFunctional,
    pub value: f64,
}

impl NsLpProblem {
    pub fn new(functional: BellFunctional, value: f64) -> Result<Self> {
        if functional.scenario() != Scenario::CHSH {
            return Err(HardyError::DimensionMismatch("the no-signalling LP covers the 2222 scenario".into()));
        }
        Ok(NsLpProblem { functional, value })
    }

    /// Optimizes `P(a,b|x,y)` over the feasible set.
    pub fn optimize_entry(&self, target: (usize, usize, usize, usize), maximize: bool) -> Result<f64> {
        let s = Scenario::CHSH;
        let mut c = vec![0.0; 16];
        c[s.index(target.0, target.1, target.2, target.3)] = 1.0;
        solve_ns(&c, Some((&self.functional, self.value)), maximize)
    }
}

/// Rows of the polytope: normalization per setting, then the independent
/// no-signalling equalities (outcome 0 only; outcome 1 follows).
fn polytope_rows() -> Vec<Vec<(usize, f64)>> {
    let s = Scenario::CHSH;
    let mut rows = Vec::new();
    for x in 0..2 {
        for y in 0..2 {
            rows.push((0..2).flat_map(|a| (0..2).map(move |b| (s.index(a, b, x, y), 1.0))).collect());
        }
    }
    for x in 0..2 {
        rows.push(
            (0..2)
                .flat_map(|b| [(s.index(0, b, x, 0), 1.0), (s.index(0, b, x, 1), -1.0)])
                .collect(),
        );
    }
    for y in 0..2 {
        rows.push(
            (0..2)
                .flat_map(|a| [(s.index(a, 0, 0, y), 1.0), (s.index(a, 0, 1, y), -1.0)])
                .collect(),
        );
    }
    rows
}

fn solve_ns(objective: &[f64], equality: Option<(&BellFunctional, f64)>, maximize: bool) -> Result<f64> {
    let s = Scenario::CHSH;
    let dir = if maximize { OptimizationDirection::Maximize } else { OptimizationDirection::Minimize };
    let mut lp = Problem::new(dir);
    let vars: Vec<Variable> = objective.iter().map(|&c| lp.add_var(c, (0.0, 1.0))).collect();
    let rhs = [1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0];
    for (row, r) in polytope_rows().into_iter().zip(rhs) {
        let expr: LinearExpr = row.into_iter().map(|(i, c)| (vars[i], c)).collect();
        lp.add_constraint(expr, ComparisonOp::Eq, r);
    }
    if let Some((f, value)) = equality {
        let joint = f.to_joint_form();
        let expr: LinearExpr = (0..16)
            .map(|i| {
                let (x, y, a, b) = (i / 8, i / 4 % 2, i / 2 % 2, i % 2);
                debug_assert_eq!(s.index(a, b, x, y), i);
                (vars[i], joint.joint(a, b, x, y))
            })
            .collect();
        lp.add_constraint(expr, ComparisonOp::Eq, value - joint.offset());
    }
    let outcome = lp.solve().map_err(|e| match e {
        microlp::Error::Infeasible => HardyError::Infeasible("no no-signalling box attains the value".into()),
        other => HardyError::Numerical(other.to_string()),
    })?;
    let sol = outcome
        .into_solution()
        .map_err(|_| HardyError::NonConvergence("LP interrupted before a solution".into()))?;
    Ok(sol.objective())
}

/// Extreme value of a functional over the no-signalling polytope.
pub fn ns_functional_extreme(f: &BellFunctional, maximize: bool) -> Result<f64> {
    let s = Scenario::CHSH;
    let joint = f.to_joint_form();
    let mut c = vec![0.0; 16];
    for a in 0..2 {
        for b in 0..2 {
            for x in 0..2 {
                for y in 0..2 {
                    c[s.index(a, b, x, y)] = joint.joint(a, b, x, y);
                }
            }
        }
    }
    Ok(solve_ns(&c, None, maximize)? + joint.offset())
}

/// `(min, max)` of the Hardy Bell quantity over no-signalling boxes.
pub fn ns_hardy_range(w: f64) -> Result<(f64, f64)> {
    check_w(w)?;
    let f = hardy_bell_functional(w);
    Ok((ns_functional_extreme(&f, false)?, ns_functional_extreme(&f, true)?))
}

/// Largest `P(a,b|x,y)` over no-signalling boxes with Hardy value `v`.
pub fn ns_lp_max_prob(w: f64, v: f64, target: (usize, usize, usize, usize)) -> Result<f64> {
    check_w(w)?;
    NsLpProblem::new(hardy_bell_functional(w), v)?.optimize_entry(target, true)
}

/// Smallest `P(a,b|x,y)` over no-signalling boxes with Hardy value `v`.
pub fn ns_lp_min_prob(w: f64, v: f64, target: (usize, usize, usize, usize)) -> Result<f64> {
    check_w(w)?;
    NsLpProblem::new(hardy_bell_functional(w), v)?.optimize_entry(target, false)
}

/// All 16 `(a, b, x, y)` targets in dense order.
pub fn all_targets() -> Vec<(usize, usize, usize, usize)> {
    (0..16).map(|i| (i / 2 % 2, i % 2, i / 8, i / 4 % 2)).collect()
}
