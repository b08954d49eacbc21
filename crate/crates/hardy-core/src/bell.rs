//! Boxes, Bell functionals and classical bounds by enumeration of
//! deterministic strategies.
//!
//! Tables are dense and indexed `(x, y, a, b)`; accessors take arguments in
//! the order of the conditional `P(a,b|x,y)`.

use serde::{Deserialize, Serialize};

use crate::error::{HardyError, Result};

/// Tolerance on per-setting normalization.
pub const NORM_TOL: f64 = 1e-12;
/// Entries above `-CLAMP_TOL` are clamped to zero; anything lower is rejected.
pub const CLAMP_TOL: f64 = 1e-12;
/// Tolerance on the no-signalling equalities.
pub const NS_TOL: f64 = 1e-10;
/// Default cap on the number of deterministic strategies to enumerate.
pub const DEFAULT_CAP: u64 = 10_000_000;

/// Input and output counts of a bipartite scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Scenario {
    pub nx: usize,
    pub ny: usize,
    pub na: usize,
    pub nb: usize,
}

impl Scenario {
    pub const fn new(nx: usize, ny: usize, na: usize, nb: usize) -> Self {
        Scenario { nx, ny, na, nb }
    }

    /// Two binary inputs and two binary outputs per party.
    pub const CHSH: Scenario = Scenario::new(2, 2, 2, 2);

    #[inline]
    pub fn index(&self, a: usize, b: usize, x: usize, y: usize) -> usize {
        ((x * self.ny + y) * self.na + a) * self.nb + b
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.na * self.nb
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn check(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 || self.na == 0 || self.nb == 0 {
            return Err(HardyError::DimensionMismatch(format!(
                "all input/output counts must be positive, got {self:?}"
            )));
        }
        Ok(())
    }

    /// Number of deterministic strategies, `na^nx * nb^ny`, saturating.
    pub fn strategy_count(&self) -> u128 {
        let pa = (self.na as u128).checked_pow(self.nx as u32);
        let pb = (self.nb as u128).checked_pow(self.ny as u32);
        match (pa, pb) {
            (Some(pa), Some(pb)) => pa.saturating_mul(pb),
            _ => u128::MAX,
        }
    }
}

/// A bipartite conditional distribution `P(a,b|x,y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Behavior {
    scenario: Scenario,
    table: Vec<f64>,
}

impl Behavior {
    /// Builds a behavior with the default tolerances.
    pub fn new(scenario: Scenario, table: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(scenario, table, NORM_TOL, NS_TOL)
    }

    /// Builds a behavior, clamping tiny negatives and checking normalization
    /// and no-signalling against the given tolerances.
    pub fn with_tolerance(
        scenario: Scenario,
        mut table: Vec<f64>,
        norm_tol: f64,
        ns_tol: f64,
    ) -> Result<Self> {
        scenario.check()?;
        if table.len() != scenario.len() {
            return Err(HardyError::DimensionMismatch(format!(
                "table has {} entries, scenario needs {}",
                table.len(),
                scenario.len()
            )));
        }
        for v in table.iter_mut() {
            if !v.is_finite() || *v < -CLAMP_TOL {
                return Err(HardyError::InvalidBehavior(format!("entry {v} is not a probability")));
            }
            *v = v.clamp(0.0, 1.0);
        }
        let beh = Behavior { scenario, table };
        let norm = beh.normalization_error();
        if norm > norm_tol {
            return Err(HardyError::InvalidBehavior(format!(
                "normalization violated by {norm:e}"
            )));
        }
        let ns = beh.signalling();
        if ns > ns_tol {
            return Err(HardyError::InvalidBehavior(format!(
                "no-signalling violated by {ns:e}"
            )));
        }
        Ok(beh)
    }

    /// Builds a behavior by evaluating `f(a, b, x, y)` on every entry.
    pub fn from_fn<F>(scenario: Scenario, f: F) -> Result<Self>
    where
        F: Fn(usize, usize, usize, usize) -> f64,
    {
        let table = table_from_fn(scenario, f);
        Self::new(scenario, table)
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// `P(a,b|x,y)`.
    #[inline]
    pub fn p(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.table[self.scenario.index(a, b, x, y)]
    }

    /// Alice's marginal `P(a|x)`, averaged over Bob's inputs.
    pub fn marginal_a(&self, a: usize, x: usize) -> f64 {
        let s = self.scenario;
        let total: f64 = (0..s.ny)
            .flat_map(|y| (0..s.nb).map(move |b| (b, y)))
            .map(|(b, y)| self.p(a, b, x, y))
            .sum();
        total / s.ny as f64
    }

    /// Bob's marginal `P(b|y)`, averaged over Alice's inputs.
    pub fn marginal_b(&self, b: usize, y: usize) -> f64 {
        let s = self.scenario;
        let total: f64 = (0..s.nx)
            .flat_map(|x| (0..s.na).map(move |a| (a, x)))
            .map(|(a, x)| self.p(a, b, x, y))
            .sum();
        total / s.nx as f64
    }

    /// Largest deviation of a setting's total mass from one.
    pub fn normalization_error(&self) -> f64 {
        let s = self.scenario;
        let mut worst = 0.0f64;
        for x in 0..s.nx {
            for y in 0..s.ny {
                let mut t = 0.0;
                for a in 0..s.na {
                    for b in 0..s.nb {
                        t += self.p(a, b, x, y);
                    }
                }
                worst = worst.max((t - 1.0).abs());
            }
        }
        worst
    }

    /// Largest dependence of one party's marginal on the other's input.
    pub fn signalling(&self) -> f64 {
        let s = self.scenario;
        let mut worst = 0.0f64;
        for x in 0..s.nx {
            for a in 0..s.na {
                let m = |y: usize| (0..s.nb).map(|b| self.p(a, b, x, y)).sum::<f64>();
                let m0 = m(0);
                for y in 1..s.ny {
                    worst = worst.max((m(y) - m0).abs());
                }
            }
        }
        for y in 0..s.ny {
            for b in 0..s.nb {
                let m = |x: usize| (0..s.na).map(|a| self.p(a, b, x, y)).sum::<f64>();
                let m0 = m(0);
                for x in 1..s.nx {
                    worst = worst.max((m(x) - m0).abs());
                }
            }
        }
        worst
    }

    /// Most likely outcome pair at setting `(x, y)` and its probability.
    pub fn max_outcome(&self, x: usize, y: usize) -> ((usize, usize), f64) {
        let s = self.scenario;
        let mut best = ((0, 0), f64::NEG_INFINITY);
        for a in 0..s.na {
            for b in 0..s.nb {
                let v = self.p(a, b, x, y);
                if v > best.1 {
                    best = ((a, b), v);
                }
            }
        }
        best
    }

    /// Convex combination `alpha * self + (1 - alpha) * other`.
    pub fn mix(&self, other: &Behavior, alpha: f64) -> Result<Behavior> {
        if self.scenario != other.scenario {
            return Err(HardyError::DimensionMismatch("mixing behaviors of different scenarios".into()));
        }
        let table = self
            .table
            .iter()
            .zip(&other.table)
            .map(|(p, q)| alpha * p + (1.0 - alpha) * q)
            .collect();
        Behavior::new(self.scenario, table)
    }

    pub fn to_json(&self) -> BehaviorJson {
        let s = self.scenario;
        let p = (0..s.nx)
            .map(|x| {
                (0..s.ny)
                    .map(|y| {
                        (0..s.na)
                            .map(|a| (0..s.nb).map(|b| self.p(a, b, x, y)).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        BehaviorJson { nx: s.nx, ny: s.ny, na: s.na, nb: s.nb, p }
    }

    pub fn from_json(json: &BehaviorJson) -> Result<Self> {
        let s = Scenario::new(json.nx, json.ny, json.na, json.nb);
        s.check()?;
        let shape_ok = json.p.len() == s.nx
            && json.p.iter().all(|py| {
                py.len() == s.ny
                    && py.iter().all(|pa| pa.len() == s.na && pa.iter().all(|pb| pb.len() == s.nb))
            });
        if !shape_ok {
            return Err(HardyError::DimensionMismatch("nested table does not match nx/ny/na/nb".into()));
        }
        Behavior::from_fn(s, |a, b, x, y| json.p[x][y][a][b])
    }
}

/// Serialized form of a [`Behavior`]; `p` is indexed `[x][y][a][b]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BehaviorJson {
    pub nx: usize,
    pub ny: usize,
    pub na: usize,
    pub nb: usize,
    pub p: Vec<Vec<Vec<Vec<f64>>>>,
}

pub(crate) fn table_from_fn<F>(s: Scenario, f: F) -> Vec<f64>
where
    F: Fn(usize, usize, usize, usize) -> f64,
{
    let mut table = vec![0.0; s.len()];
    for x in 0..s.nx {
        for y in 0..s.ny {
            for a in 0..s.na {
                for b in 0..s.nb {
                    table[s.index(a, b, x, y)] = f(a, b, x, y);
                }
            }
        }
    }
    table
}

/// A linear functional on behaviors: joint terms, marginal terms and a
/// constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellFunctional {
    scenario: Scenario,
    joint: Vec<f64>,
    marg_a: Vec<f64>,
    marg_b: Vec<f64>,
    offset: f64,
}

impl BellFunctional {
    pub fn zero(scenario: Scenario) -> Self {
        BellFunctional {
            scenario,
            joint: vec![0.0; scenario.len()],
            marg_a: vec![0.0; scenario.nx * scenario.na],
            marg_b: vec![0.0; scenario.ny * scenario.nb],
            offset: 0.0,
        }
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn joint(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.joint[self.scenario.index(a, b, x, y)]
    }

    pub fn marginal_a(&self, a: usize, x: usize) -> f64 {
        self.marg_a[x * self.scenario.na + a]
    }

    pub fn marginal_b(&self, b: usize, y: usize) -> f64 {
        self.marg_b[y * self.scenario.nb + b]
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn add_joint(mut self, a: usize, b: usize, x: usize, y: usize, c: f64) -> Self {
        let i = self.scenario.index(a, b, x, y);
        self.joint[i] += c;
        self
    }

    pub fn add_marginal_a(mut self, a: usize, x: usize, c: f64) -> Self {
        self.marg_a[x * self.scenario.na + a] += c;
        self
    }

    pub fn add_marginal_b(mut self, b: usize, y: usize, c: f64) -> Self {
        self.marg_b[y * self.scenario.nb + b] += c;
        self
    }

    pub fn add_offset(mut self, c: f64) -> Self {
        self.offset += c;
        self
    }

    /// Adds `c * <A_x B_y>` for binary outcomes, with `<A_x B_y> = sum (-1)^(a+b) P`.
    pub fn add_correlator(mut self, x: usize, y: usize, c: f64) -> Self {
        for a in 0..2 {
            for b in 0..2 {
                let sign = if (a + b) % 2 == 0 { 1.0 } else { -1.0 };
                self = self.add_joint(a, b, x, y, sign * c);
            }
        }
        self
    }

    /// Adds `c * <A_x>` for a binary Alice outcome.
    pub fn add_alice_mean(self, x: usize, c: f64) -> Self {
        self.add_marginal_a(0, x, c).add_marginal_a(1, x, -c)
    }

    /// Adds `c * <B_y>` for a binary Bob outcome.
    pub fn add_bob_mean(self, y: usize, c: f64) -> Self {
        self.add_marginal_b(0, y, c).add_marginal_b(1, y, -c)
    }

    /// `scale * self + other`, both over the same scenario.
    pub fn combine(&self, scale: f64, other: &BellFunctional) -> Result<Self> {
        if self.scenario != other.scenario {
            return Err(HardyError::DimensionMismatch("combining functionals of different scenarios".into()));
        }
        let zip = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(p, q)| scale * p + q).collect();
        Ok(BellFunctional {
            scenario: self.scenario,
            joint: zip(&self.joint, &other.joint),
            marg_a: zip(&self.marg_a, &other.marg_a),
            marg_b: zip(&self.marg_b, &other.marg_b),
            offset: scale * self.offset + other.offset,
        })
    }

    /// Folds marginal terms into joint terms, using the averaged marginals of
    /// [`Behavior::marginal_a`]/[`Behavior::marginal_b`]. The result has only
    /// joint coefficients and an offset and evaluates identically.
    pub fn to_joint_form(&self) -> BellFunctional {
        let s = self.scenario;
        let mut out = BellFunctional::zero(s);
        out.offset = self.offset;
        for x in 0..s.nx {
            for y in 0..s.ny {
                for a in 0..s.na {
                    for b in 0..s.nb {
                        let c = self.joint(a, b, x, y)
                            + self.marginal_a(a, x) / s.ny as f64
                            + self.marginal_b(b, y) / s.nx as f64;
                        out.joint[s.index(a, b, x, y)] = c;
                    }
                }
            }
        }
        out
    }

    pub fn eval(&self, p: &Behavior) -> Result<f64> {
        if p.scenario != self.scenario {
            return Err(HardyError::DimensionMismatch(format!(
                "functional over {:?} evaluated on behavior over {:?}",
                self.scenario, p.scenario
            )));
        }
        let s = self.scenario;
        let mut v = self.offset;
        v += self.joint.iter().zip(&p.table).map(|(c, q)| c * q).sum::<f64>();
        for x in 0..s.nx {
            for a in 0..s.na {
                let c = self.marginal_a(a, x);
                if c != 0.0 {
                    v += c * p.marginal_a(a, x);
                }
            }
        }
        for y in 0..s.ny {
            for b in 0..s.nb {
                let c = self.marginal_b(b, y);
                if c != 0.0 {
                    v += c * p.marginal_b(b, y);
                }
            }
        }
        Ok(v)
    }

    /// Value on a deterministic box, without building its behavior.
    pub fn eval_deterministic(&self, d: &DeterministicBox) -> f64 {
        let s = self.scenario;
        let mut v = self.offset;
        for x in 0..s.nx {
            for y in 0..s.ny {
                v += self.joint(d.a[x], d.b[y], x, y);
            }
            v += self.marginal_a(d.a[x], x);
        }
        for y in 0..s.ny {
            v += self.marginal_b(d.b[y], y);
        }
        v
    }
}

/// A local deterministic strategy: Alice outputs `a[x]`, Bob outputs `b[y]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DeterministicBox {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

impl DeterministicBox {
    /// Whether the box gives probability one to `(a, b)` at `(x, y)`.
    #[inline]
    pub fn fires(&self, a: usize, b: usize, x: usize, y: usize) -> bool {
        self.a[x] == a && self.b[y] == b
    }

    pub fn behavior(&self, s: Scenario) -> Behavior {
        let table = table_from_fn(s, |a, b, x, y| if self.fires(a, b, x, y) { 1.0 } else { 0.0 });
        Behavior { scenario: s, table }
    }

    fn from_index(s: Scenario, mut k: u128) -> Self {
        // Last digit varies fastest, so increasing k is lexicographic order.
        let mut b = vec![0; s.ny];
        for j in (0..s.ny).rev() {
            b[j] = (k % s.nb as u128) as usize;
            k /= s.nb as u128;
        }
        let mut a = vec![0; s.nx];
        for i in (0..s.nx).rev() {
            a[i] = (k % s.na as u128) as usize;
            k /= s.na as u128;
        }
        DeterministicBox { a, b }
    }
}

fn check_cap(s: Scenario, cap: u64) -> Result<u128> {
    s.check()?;
    let count = s.strategy_count();
    if count > cap as u128 {
        return Err(HardyError::CapExceeded { count, cap });
    }
    Ok(count)
}

/// All deterministic strategies in lexicographic order of `(a(0..), b(0..))`.
pub fn enumerate_deterministic(s: Scenario) -> Result<Vec<DeterministicBox>> {
    enumerate_deterministic_capped(s, DEFAULT_CAP)
}

pub fn enumerate_deterministic_capped(s: Scenario, cap: u64) -> Result<Vec<DeterministicBox>> {
    let count = check_cap(s, cap)?;
    Ok((0..count).map(|k| DeterministicBox::from_index(s, k)).collect())
}

/// Maximum of `f` over deterministic boxes with the first maximizer in
/// lexicographic order.
pub fn classical_bound(f: &BellFunctional) -> Result<(f64, DeterministicBox)> {
    best_box(f, &[], DEFAULT_CAP)?
        .ok_or_else(|| HardyError::Numerical("empty strategy space".into()))
}

/// Maximum of `f` over the deterministic boxes that assign zero probability
/// to every listed `(a, b, x, y)` entry, or `-inf` if none does.
pub fn constrained_classical_bound(
    f: &BellFunctional,
    zeros: &[(usize, usize, usize, usize)],
) -> Result<f64> {
    Ok(best_box(f, zeros, DEFAULT_CAP)?.map_or(f64::NEG_INFINITY, |(v, _)| v))
}

/// Deterministic boxes satisfying the listed zero constraints.
pub fn boxes_with_zeros(
    s: Scenario,
    zeros: &[(usize, usize, usize, usize)],
) -> Result<Vec<DeterministicBox>> {
    Ok(enumerate_deterministic(s)?
        .into_iter()
        .filter(|d| zeros.iter().all(|&(a, b, x, y)| !d.fires(a, b, x, y)))
        .collect())
}

pub fn best_box(
    f: &BellFunctional,
    zeros: &[(usize, usize, usize, usize)],
    cap: u64,
) -> Result<Option<(f64, DeterministicBox)>> {
    let s = f.scenario;
    let count = check_cap(s, cap)?;
    for &(a, b, x, y) in zeros {
        if a >= s.na || b >= s.nb || x >= s.nx || y >= s.ny {
            return Err(HardyError::DimensionMismatch(format!(
                "zero constraint ({a},{b},{x},{y}) outside {s:?}"
            )));
        }
    }
    let mut best: Option<(f64, DeterministicBox)> = None;
    for k in 0..count {
        let d = DeterministicBox::from_index(s, k);
        if zeros.iter().any(|&(a, b, x, y)| d.fires(a, b, x, y)) {
            continue;
        }
        let v = f.eval_deterministic(&d);
        if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
            best = Some((v, d));
        }
    }
    Ok(best)
}

/// The three Hardy zero constraints `P(0,1|0,1) = P(1,0|1,0) = P(0,0|1,1) = 0`
/// as `(a, b, x, y)` entries.
pub const HARDY_ZEROS: [(usize, usize, usize, usize); 3] = [(0, 1, 0, 1), (1, 0, 1, 0), (0, 0, 1, 1)];

/// `P(0,0|0,0) + w P(1,1|0,0)`, the non-zero term of the tilted Hardy test.
pub fn tilted_hardy_functional(w: f64) -> BellFunctional {
    BellFunctional::zero(Scenario::CHSH)
        .add_joint(0, 0, 0, 0, 1.0)
        .add_joint(1, 1, 0, 0, w)
}

/// The tilted Hardy Bell quantity: the non-zero term minus `max(0, w)`
/// minus the three zero-constrained probabilities.
pub fn hardy_bell_functional(w: f64) -> BellFunctional {
    let mut f = tilted_hardy_functional(w).add_offset(-w.max(0.0));
    for &(a, b, x, y) in &HARDY_ZEROS {
        f = f.add_joint(a, b, x, y, -1.0);
    }
    f
}

/// Correlator-form Bell expression
/// `(1+w)A0B0 + A0B1 + A1B0 - A1B1 - w(A0 + B0)`.
pub fn iw_functional(w: f64) -> BellFunctional {
    BellFunctional::zero(Scenario::CHSH)
        .add_correlator(0, 0, 1.0 + w)
        .add_correlator(0, 1, 1.0)
        .add_correlator(1, 0, 1.0)
        .add_correlator(1, 1, -1.0)
        .add_alice_mean(0, -w)
        .add_bob_mean(0, -w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_has_sixteen_boxes() {
        let boxes = enumerate_deterministic(Scenario::CHSH).unwrap();
        assert_eq!(boxes.len(), 16);
        let mut sorted = boxes.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted, boxes);
    }

    #[test]
    fn trivial_scenario_has_one_box() {
        assert_eq!(enumerate_deterministic(Scenario::new(1, 1, 1, 1)).unwrap().len(), 1);
    }

    #[test]
    fn hardy_zeros_leave_five_boxes() {
        assert_eq!(boxes_with_zeros(Scenario::CHSH, &HARDY_ZEROS).unwrap().len(), 5);
    }

    #[test]
    fn cap_is_enforced() {
        let err = enumerate_deterministic_capped(Scenario::new(30, 1, 2, 1), 1000).unwrap_err();
        assert!(matches!(err, HardyError::CapExceeded { .. }));
    }

    #[test]
    fn deterministic_behaviors_are_valid() {
        for d in enumerate_deterministic(Scenario::new(2, 3, 3, 2)).unwrap() {
            let p = d.behavior(Scenario::new(2, 3, 3, 2));
            assert_eq!(p.normalization_error(), 0.0);
            assert_eq!(p.signalling(), 0.0);
        }
    }

    #[test]
    fn iw_classical_values() {
        for (w, expect) in [(0.0, 2.0), (0.44, 3.32), (-0.2, 2.2)] {
            let (v, _) = classical_bound(&iw_functional(w)).unwrap();
            assert!((v - expect).abs() < 1e-12, "w={w}: {v}");
        }
    }

    #[test]
    fn constrained_bounds() {
        let f = tilted_hardy_functional(0.5);
        assert_eq!(constrained_classical_bound(&f, &HARDY_ZEROS).unwrap(), 0.5);
        let f = tilted_hardy_functional(-0.1);
        assert_eq!(constrained_classical_bound(&f, &HARDY_ZEROS).unwrap(), 0.0);
        let all: Vec<_> = (0..2)
            .flat_map(|a| (0..2).flat_map(move |b| (0..2).flat_map(move |x| (0..2).map(move |y| (a, b, x, y)))))
            .collect();
        assert_eq!(constrained_classical_bound(&f, &all).unwrap(), f64::NEG_INFINITY);
        let (free, _) = classical_bound(&f).unwrap();
        assert_eq!(constrained_classical_bound(&f, &[]).unwrap(), free);
    }

    #[test]
    fn ties_go_to_first_box() {
        let (v, d) = classical_bound(&BellFunctional::zero(Scenario::CHSH)).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(d, DeterministicBox { a: vec![0, 0], b: vec![0, 0] });
    }

    #[test]
    fn eval_matches_deterministic_shortcut() {
        let f = iw_functional(0.3).add_offset(0.7).add_joint(1, 0, 1, 1, 2.5);
        for d in enumerate_deterministic(Scenario::CHSH).unwrap() {
            let direct = f.eval(&d.behavior(Scenario::CHSH)).unwrap();
            assert!((direct - f.eval_deterministic(&d)).abs() < 1e-12);
        }
    }

    #[test]
    fn joint_form_evaluates_identically() {
        let f = iw_functional(-0.2);
        let g = f.to_joint_form();
        for d in enumerate_deterministic(Scenario::CHSH).unwrap() {
            let p = d.behavior(Scenario::CHSH);
            assert!((f.eval(&p).unwrap() - g.eval(&p).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let f = BellFunctional::zero(Scenario::new(3, 2, 2, 2));
        let p = enumerate_deterministic(Scenario::CHSH).unwrap()[0].behavior(Scenario::CHSH);
        assert!(matches!(f.eval(&p), Err(HardyError::DimensionMismatch(_))));
    }

    #[test]
    fn rejects_bad_tables() {
        let s = Scenario::CHSH;
        assert!(Behavior::new(s, vec![0.25; 16]).is_ok());
        assert!(Behavior::new(s, vec![0.3; 16]).is_err());
        let mut t = enumerate_deterministic(s).unwrap()[0].behavior(s).table().to_vec();
        t[1] = -1e-13;
        assert_eq!(Behavior::new(s, t.clone()).unwrap().p(1, 0, 0, 0), 0.0);
        t[1] = -1e-11;
        assert!(Behavior::new(s, t).is_err());
        // Alice's marginal depends on y.
        let sig = table_from_fn(s, |a, b, _x, y| if a == y && b == 0 { 1.0 } else { 0.0 });
        assert!(Behavior::new(s, sig).is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = Behavior::from_fn(Scenario::new(2, 3, 2, 2), |a, b, _, _| 0.1 + 0.2 * a as f64 + 0.1 * b as f64).unwrap();
        let s = serde_json::to_string(&p.to_json()).unwrap();
        let back: BehaviorJson = serde_json::from_str(&s).unwrap();
        assert_eq!(Behavior::from_json(&back).unwrap(), p);
    }
}
