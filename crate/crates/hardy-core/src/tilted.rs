//! The tilted Hardy test: optimal two-qubit strategy, quantum maximum,
//! certified randomness and the reduction of general Hardy expressions.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bell::{Behavior, Scenario, HARDY_ZEROS};
use crate::error::{HardyError, Result};
use crate::numeric::{brent_root, nelder_mead_max};
use crate::quantum::{xz_behavior, xz_table, XzObservable};

/// Tilt parameter `w`, restricted to the open interval `(-1/4, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct TiltParameter(f64);

impl TiltParameter {
    pub fn new(w: f64) -> Result<Self> {
        if !(w > -0.25 && w < 1.0) {
            return Err(HardyError::OutOfRange(format!("w = {w} is outside (-1/4, 1)")));
        }
        Ok(TiltParameter(w))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `sqrt(4w + 5)`, which appears in every closed form below.
    fn r(self) -> f64 {
        (4.0 * self.0 + 5.0).sqrt()
    }
}

impl TryFrom<f64> for TiltParameter {
    type Error = HardyError;
    fn try_from(w: f64) -> Result<Self> {
        TiltParameter::new(w)
    }
}

impl From<TiltParameter> for f64 {
    fn from(w: TiltParameter) -> f64 {
        w.0
    }
}

/// `sin θ` of the optimal state, `3 - sqrt(4w + 5)`.
pub fn optimal_sin_theta(w: TiltParameter) -> f64 {
    3.0 - w.r()
}

/// Schmidt angle of the optimal state, in `(0, π/2]`.
pub fn optimal_theta(w: TiltParameter) -> f64 {
    optimal_sin_theta(w).clamp(-1.0, 1.0).asin()
}

/// `((4w+5)^{3/2} - (12w+11)) / (2(w+1))`.
pub fn quantum_max(w: TiltParameter) -> f64 {
    let w = w.value();
    let q = 4.0 * w + 5.0;
    (q * q.sqrt() - (12.0 * w + 11.0)) / (2.0 * (w + 1.0))
}

/// Hardy value of the optimal measurements for a state of Schmidt angle
/// `theta`: `(sin²θ + 4w)(1 - sinθ) / (2 - sinθ)²`.
pub fn hardy_value(w: f64, theta: f64) -> f64 {
    hardy_value_sin(w, theta.sin())
}

pub fn hardy_value_sin(w: f64, s: f64) -> f64 {
    (s * s + 4.0 * w) * (1.0 - s) / ((2.0 - s) * (2.0 - s))
}

/// Two-qubit strategy on `cos(θ/2)|00> - sin(θ/2)|11>` with X-Z plane
/// observables indexed by input.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitStrategy {
    theta: f64,
    alice: [XzObservable; 2],
    bob: [XzObservable; 2],
}

impl TwoQubitStrategy {
    pub fn new(theta: f64, alice: [XzObservable; 2], bob: [XzObservable; 2]) -> Result<Self> {
        if !(theta > 0.0 && theta <= FRAC_PI_2 + 1e-15) {
            return Err(HardyError::OutOfRange(format!("theta = {theta} is outside (0, π/2]")));
        }
        if let Some(o) = alice.iter().chain(&bob).find(|o| o.norm_error() >= 1e-12) {
            return Err(HardyError::OutOfRange(format!("observable {o:?} is not a unit vector")));
        }
        Ok(TwoQubitStrategy { theta, alice, bob })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn alice(&self) -> &[XzObservable; 2] {
        &self.alice
    }

    pub fn bob(&self) -> &[XzObservable; 2] {
        &self.bob
    }
}

/// Observables of the optimal strategy for a state with `sin θ = s`:
/// `[A_0, A_1]`, used by both parties.
pub fn canonical_observables(s: f64) -> [XzObservable; 2] {
    let sp = (1.0 + s).sqrt();
    let sm = (1.0 - s).max(0.0).sqrt();
    let a1 = XzObservable { c_z: -sm / sp, c_x: (2.0 * s).sqrt() / sp };
    let d = (2.0 - s) * sp;
    let a0 = XzObservable {
        c_z: -(2.0 + s) * sm / d,
        c_x: -std::f64::consts::SQRT_2 * s * s.sqrt() / d,
    };
    [a0, a1]
}

pub fn canonical_strategy(w: TiltParameter) -> TwoQubitStrategy {
    let obs = canonical_observables(optimal_sin_theta(w));
    TwoQubitStrategy { theta: optimal_theta(w), alice: obs, bob: obs }
}

pub fn behavior_of(strategy: &TwoQubitStrategy) -> Behavior {
    xz_behavior(strategy.theta, &strategy.alice, &strategy.bob)
}

/// Which expression of the piecewise global-randomness formula applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GlobalBranch {
    One,
    Two,
    Three,
    Four,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomnessReport {
    pub h_local: f64,
    pub h_global: f64,
    /// Min-entropy recomputed from the behavior table.
    pub h_global_from_behavior: f64,
    pub branch: GlobalBranch,
    pub argmax_setting: (usize, usize),
    pub argmax_outcome: (usize, usize),
}

/// `1 - log2[1 + cosθ (1 - tan θ/2)/(1 + tan θ/2)]` at the optimal θ.
pub fn h_local(w: TiltParameter) -> f64 {
    let th = optimal_theta(w);
    let t = (0.5 * th).tan();
    1.0 - (1.0 + th.cos() * (1.0 - t) / (1.0 + t)).log2()
}

/// The `k`-th expression (1-based) of the piecewise global randomness.
pub fn h_global_branch(k: usize, w: f64) -> f64 {
    let r = (4.0 * w + 5.0).sqrt();
    let arg = match k {
        1 => (3.0 - r).powi(3) / ((r - 1.0) * (r - 1.0)),
        2 => (8.0 * r - 16.0) / ((r - 1.0) * (r - 1.0)),
        3 => 3.0 - r,
        4 => 2.0 * r - 4.0,
        _ => panic!("branch index {k} outside 1..=4"),
    };
    1.0 - arg.log2()
}

pub fn global_branch(w: TiltParameter) -> GlobalBranch {
    let bp = breakpoints();
    let w = w.value();
    if w <= bp.w0 {
        GlobalBranch::One
    } else if w <= bp.w1 {
        GlobalBranch::Two
    } else if w <= 1.0 / 9.0 {
        GlobalBranch::Three
    } else {
        GlobalBranch::Four
    }
}

pub fn h_global(w: TiltParameter) -> f64 {
    let k = match global_branch(w) {
        GlobalBranch::One => 1,
        GlobalBranch::Two => 2,
        GlobalBranch::Three => 3,
        GlobalBranch::Four => 4,
    };
    h_global_branch(k, w.value())
}

/// Largest min-entropy over settings, with the setting and the most
/// likely outcome there.
pub fn behavior_min_entropy(p: &Behavior) -> (f64, (usize, usize), (usize, usize)) {
    let s = p.scenario();
    let mut best = (f64::NEG_INFINITY, (0, 0), (0, 0));
    for x in 0..s.nx {
        for y in 0..s.ny {
            let (ab, pmax) = p.max_outcome(x, y);
            let h = -pmax.log2();
            if h > best.0 + 1e-13 {
                best = (h, (x, y), ab);
            }
        }
    }
    best
}

pub fn randomness(w: TiltParameter) -> RandomnessReport {
    let p = behavior_of(&canonical_strategy(w));
    let (hb, setting, outcome) = behavior_min_entropy(&p);
    RandomnessReport {
        h_local: h_local(w),
        h_global: h_global(w),
        h_global_from_behavior: hb,
        branch: global_branch(w),
        argmax_setting: setting,
        argmax_outcome: outcome,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Breakpoints {
    /// Closed-form values.
    pub w0: f64,
    pub w1: f64,
    /// The same points found as crossings of adjacent branch expressions.
    pub w0_root: f64,
    pub w1_root: f64,
}

pub fn w0_closed_form() -> f64 {
    let s177 = 177f64.sqrt();
    let inner = 3.0 + 4.0 * (2.0 / (3.0 * (9.0 + s177))).cbrt() - (4.0 + 4.0 * s177 / 9.0).cbrt();
    0.25 * (-5.0 + inner * inner)
}

pub fn w1_closed_form() -> f64 {
    let s69 = 69f64.sqrt();
    let inner = 3.0
        + (-4.0 + 10.0 * (2.0 / (-11.0 + 3.0 * s69)).cbrt() - (12.0 * s69 - 44.0).cbrt()) / 3.0;
    0.25 * (-5.0 + inner * inner)
}

pub fn breakpoints() -> Breakpoints {
    let w0 = w0_closed_form();
    let w1 = w1_closed_form();
    let cross = |j: usize, lo: f64, hi: f64| {
        brent_root(|w| h_global_branch(j, w) - h_global_branch(j + 1, w), lo, hi, 1e-15)
            .unwrap_or(f64::NAN)
    };
    Breakpoints {
        w0,
        w1,
        w0_root: cross(1, -0.17, -0.14),
        w1_root: cross(2, -0.12, -0.09),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyReduction {
    pub scale: f64,
    pub offset: f64,
    pub w: f64,
}

/// Rewrites `Σ α_ij P(i,j|A0,B0)` (with `alpha = [α00, α01, α10, α11]`) as
/// `offset + scale · (P(0,0|A0,B0) + w P(1,1|A0,B0))`, valid on behaviors
/// with the Hardy zeros and `P(0,1|A0,B0) = P(1,0|A0,B0)`.
pub fn reduce_general_hardy(alpha: [f64; 4]) -> Result<HardyReduction> {
    let offset = 0.5 * (alpha[1] + alpha[2]);
    let scale = alpha[0] - offset;
    if scale == 0.0 {
        return Err(HardyError::DegenerateReduction);
    }
    Ok(HardyReduction { scale, offset, w: (alpha[3] - offset) / scale })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfTestReport {
    pub w: f64,
    pub restarts: usize,
    pub best_value: f64,
    pub best_theta: f64,
    pub quantum_max: f64,
    /// Largest violated zero constraint at the best point.
    pub zero_residual: f64,
    /// Distance of recovered observables to the canonical ones, minimized
    /// over the symmetry group.
    pub strategy_distance: f64,
    /// Restarts whose value came within 1e-4 of the quantum maximum.
    pub converged_restarts: usize,
    pub passed: bool,
}

const PENALTIES: [f64; 3] = [1e2, 1e4, 1e6];

fn decode(v: &[f64]) -> (f64, [XzObservable; 2], [XzObservable; 2]) {
    let theta = FRAC_PI_2 * v[0].sin().powi(2);
    let o = |i: usize| XzObservable::from_angle(v[i]);
    (theta, [o(1), o(2)], [o(3), o(4)])
}

fn penalized(w: f64, mu: f64, v: &[f64]) -> f64 {
    let (theta, a, b) = decode(v);
    let t = xz_table(theta, &a, &b);
    let s = Scenario::CHSH;
    let value = t[s.index(0, 0, 0, 0)] + w * t[s.index(1, 1, 0, 0)];
    let zeros: f64 = HARDY_ZEROS.iter().map(|&(a, b, x, y)| t[s.index(a, b, x, y)]).sum();
    value - mu * zeros
}

fn observable_distance(a: &XzObservable, b: &XzObservable) -> f64 {
    (a.c_z - b.c_z).hypot(a.c_x - b.c_x)
}

/// Distance of a strategy to the canonical one, up to flipping the sign of
/// every X component and exchanging the parties.
pub fn distance_to_canonical(w: TiltParameter, s: &TwoQubitStrategy) -> f64 {
    let canon = canonical_strategy(w);
    let flip = |o: &XzObservable| XzObservable { c_z: o.c_z, c_x: -o.c_x };
    let mut best = f64::INFINITY;
    for swap in [false, true] {
        let (al, bo) = if swap { (&s.bob, &s.alice) } else { (&s.alice, &s.bob) };
        for sign in [false, true] {
            let mut d = (s.theta - canon.theta).abs();
            for x in 0..2 {
                let (a, b) = if sign { (flip(&al[x]), flip(&bo[x])) } else { (al[x], bo[x]) };
                d = d
                    .max(observable_distance(&a, &canon.alice[x]))
                    .max(observable_distance(&b, &canon.bob[x]));
            }
            best = best.min(d);
        }
    }
    best
}

/// Multi-start maximization of the Hardy value over all X-Z plane two-qubit
/// strategies, with the zero constraints enforced by an increasing penalty.
pub fn selftest_uniqueness_check(w: TiltParameter, restarts: usize, seed: u64) -> Result<SelfTestReport> {
    if restarts == 0 {
        return Err(HardyError::OutOfRange("at least one restart is required".into()));
    }
    let wv = w.value();
    let qmax = quantum_max(w);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut converged = 0;
    for _ in 0..restarts {
        let mut x: Vec<f64> = (0..5).map(|_| rng.gen_range(-PI..PI)).collect();
        for mu in PENALTIES {
            let (xn, _) = nelder_mead_max(|v| penalized(wv, mu, v), &x, 0.3, 1e-15, 20_000)?;
            x = xn;
        }
        // Restart the simplex at the final penalty to escape early collapse.
        let (x, _) = nelder_mead_max(|v| penalized(wv, PENALTIES[2], v), &x, 1e-3, 1e-16, 20_000)?;
        let (theta, a, b) = decode(&x);
        let t = xz_table(theta, &a, &b);
        let s = Scenario::CHSH;
        let value = t[s.index(0, 0, 0, 0)] + wv * t[s.index(1, 1, 0, 0)];
        if (value - qmax).abs() < 1e-4 {
            converged += 1;
        }
        if best.as_ref().is_none_or(|(bv, _)| penalized(wv, PENALTIES[2], &x) > *bv) {
            best = Some((penalized(wv, PENALTIES[2], &x), x));
        }
    }
    let (_, x) = best.expect("restarts >= 1");
    let (theta, a, b) = decode(&x);
    let t = xz_table(theta, &a, &b);
    let s = Scenario::CHSH;
    let value = t[s.index(0, 0, 0, 0)] + wv * t[s.index(1, 1, 0, 0)];
    if (value - qmax).abs() >= 1e-4 {
        return Err(HardyError::NonConvergence(format!(
            "best Hardy value {value} is not within 1e-4 of the quantum maximum {qmax}"
        )));
    }
    let zero_residual = HARDY_ZEROS
        .iter()
        .map(|&(a, b, x, y)| t[s.index(a, b, x, y)])
        .fold(0.0, f64::max);
    let strategy = TwoQubitStrategy { theta, alice: a, bob: b };
    let strategy_distance = distance_to_canonical(w, &strategy);
    Ok(SelfTestReport {
        w: wv,
        restarts,
        best_value: value,
        best_theta: theta,
        quantum_max: qmax,
        zero_residual,
        strategy_distance,
        converged_restarts: converged,
        passed: (value - qmax).abs() < 1e-6 && strategy_distance < 1e-4,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tw(w: f64) -> TiltParameter {
        TiltParameter::new(w).unwrap()
    }

    #[test]
    fn rejects_out_of_range() {
        for w in [-0.25, -0.3, 1.0, 2.0, f64::NAN] {
            assert!(TiltParameter::new(w).is_err());
        }
    }

    #[test]
    fn optimal_theta_at_zero() {
        let th = optimal_theta(tw(0.0));
        assert!((th.sin() - (3.0 - 5f64.sqrt())).abs() < 1e-15);
        assert!((th - 0.8693846874621883).abs() < 1e-12);
        assert!((optimal_theta(tw(-0.2499999)) - FRAC_PI_2).abs() < 1e-3);
        assert!(optimal_sin_theta(tw(0.9999999)) < 1e-7);
    }

    #[test]
    fn quantum_max_values() {
        assert!((quantum_max(tw(0.0)) - (5.0 * 5f64.sqrt() - 11.0) / 2.0).abs() < 1e-15);
        assert!(quantum_max(tw(-0.2499999999)) < 1e-8);
        assert!((quantum_max(tw(0.9999999999)) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn hardy_value_matches_quantum_max_on_grid() {
        for i in 0..200 {
            let w = -0.249 + 1.248 * i as f64 / 199.0;
            let w = tw(w);
            let diff = hardy_value(w.value(), optimal_theta(w)) - quantum_max(w);
            assert!(diff.abs() < 1e-12, "w={w:?} diff={diff}");
            assert_eq!(hardy_value(w.value(), FRAC_PI_2), 0.0);
        }
    }

    #[test]
    fn maximally_entangled_limit_observables() {
        let [a0, a1] = canonical_observables(1.0);
        assert!(a1.c_z.abs() < 1e-15 && (a1.c_x - 1.0).abs() < 1e-15);
        assert!(a0.c_z.abs() < 1e-15 && (a0.c_x + 1.0).abs() < 1e-15);
    }

    #[test]
    fn canonical_behavior_at_zero() {
        let p = behavior_of(&canonical_strategy(tw(0.0)));
        let s = 3.0 - 5f64.sqrt();
        let expect = s.powi(3) / (2.0 * (2.0 - s).powi(2));
        assert!((p.p(0, 1, 0, 0) - expect).abs() < 1e-12);
        assert!((expect - 0.145898).abs() < 1e-6);
        assert!((p.p(0, 0, 0, 0) - 0.0901699437).abs() < 1e-9);
        for &(a, b, x, y) in &HARDY_ZEROS {
            assert!(p.p(a, b, x, y) < 1e-12);
        }
    }

    #[test]
    fn reduction_examples() {
        let r = reduce_general_hardy([1.0, 0.0, 0.0, 0.3]).unwrap();
        assert_eq!((r.scale, r.offset, r.w), (1.0, 0.0, 0.3));
        let r = reduce_general_hardy([2.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!((r.scale, r.offset, r.w), (1.0, 1.0, -1.0));
        let r = reduce_general_hardy([0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!((r.scale, r.offset, r.w), (-1.0, 1.0, 1.0));
        assert_eq!(reduce_general_hardy([1.0, 1.0, 1.0, 0.2]), Err(HardyError::DegenerateReduction));
    }

    #[test]
    fn reduction_identity_on_canonical_behavior() {
        let p = behavior_of(&canonical_strategy(tw(0.0)));
        let alpha = [2.0, 1.0, 1.0, 0.0];
        let r = reduce_general_hardy(alpha).unwrap();
        let lhs = alpha[0] * p.p(0, 0, 0, 0)
            + alpha[1] * p.p(0, 1, 0, 0)
            + alpha[2] * p.p(1, 0, 0, 0)
            + alpha[3] * p.p(1, 1, 0, 0);
        let rhs = r.offset + r.scale * (p.p(0, 0, 0, 0) + r.w * p.p(1, 1, 0, 0));
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn breakpoint_constants() {
        let bp = breakpoints();
        assert!((bp.w0 + 0.1546).abs() < 5e-5);
        assert!((bp.w1 + 0.1054).abs() < 5e-5);
        assert!((bp.w0 - bp.w0_root).abs() < 1e-9);
        assert!((bp.w1 - bp.w1_root).abs() < 1e-9);
        let w = 1.0 / 9.0;
        assert!((h_global_branch(3, w) - h_global_branch(4, w)).abs() < 1e-12);
        assert!((h_global_branch(3, w) - (1.0 - (2.0f64 / 3.0).log2())).abs() < 1e-12);
    }

    #[test]
    fn global_randomness_peak() {
        let r = randomness(tw(w0_closed_form()));
        assert!((r.h_global - 1.6806).abs() < 1e-3);
        assert!((r.h_global - r.h_global_from_behavior).abs() < 1e-9);
        assert!(h_local(tw(-0.2499)) > 0.999);
    }

    #[test]
    fn selftest_at_zero() {
        let rep = selftest_uniqueness_check(tw(0.0), 8, 7).unwrap();
        assert!(rep.passed, "{rep:?}");
    }
}
