//! Guessing probability under colored noise: the observed behavior keeps
//! the Hardy zeros but reaches only a Hardy value `p` below the maximum.
//!
//! For fixed `p` the state angle has two solutions `θ1 < θ2`. Eve's best
//! strategy either prepares the pure state at `θ1`, or mixes the state at
//! the tangent point `p_k` with a deterministic box.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{HardyError, Result};
use crate::numeric::{bracket_scan, brent_root, central_diff};
use crate::tilted::{hardy_value, optimal_theta, quantum_max, TiltParameter};

/// Step of the central differences used for the tangency condition.
pub const DIFF_STEP: f64 = 1e-6;

/// Closeness to the maximum below which both angles are taken as optimal.
const MERGE_TOL: f64 = 1e-12;

fn sin_roots(p: f64, w: f64) -> (f64, f64) {
    // Roots of s³ - (1-p)s² - 4(p-w)s + 4(p-w) = 0 by the trigonometric
    // solution of the depressed cubic.
    let d = 1.0 + 10.0 * p + p * p - 12.0 * w;
    let n = p.powi(3) + 15.0 * p * p + p * (39.0 - 18.0 * w) - 36.0 * w - 1.0;
    let ac = (n / d.powi(3).sqrt()).clamp(-1.0, 1.0).acos();
    let base = (1.0 - p) / 3.0;
    let amp = 2.0 / 3.0 * d.sqrt();
    (base + amp * (PI / 6.0 - ac / 3.0).sin(), base + amp * (PI / 6.0 + ac / 3.0).sin())
}

/// One Newton step on `hardy_value(w, θ) - p`, kept only if it lowers the
/// residual.
fn polish(theta: f64, p: f64, w: f64) -> f64 {
    let r0 = hardy_value(w, theta) - p;
    let d = central_diff(&|t| hardy_value(w, t), theta, 1e-7);
    if d == 0.0 || !d.is_finite() {
        return theta;
    }
    let t1 = (theta - r0 / d).clamp(0.0, std::f64::consts::FRAC_PI_2);
    if (hardy_value(w, t1) - p).abs() < r0.abs() {
        t1
    } else {
        theta
    }
}

/// The two state angles `(θ1, θ2)`, `θ1 <= θ2`, whose optimal Hardy value
/// equals `p`.
pub fn theta_solutions(p: f64, w: TiltParameter) -> Result<(f64, f64)> {
    let qmax = quantum_max(w);
    if !(p >= 0.0) || p > qmax + 1e-12 {
        return Err(HardyError::OutOfRange(format!("p = {p} is outside [0, {qmax}]")));
    }
    if qmax - p < MERGE_TOL {
        let t = optimal_theta(w);
        return Ok((t, t));
    }
    let wv = w.value();
    let (s1, s2) = sin_roots(p, wv);
    let valid = |s: f64| (-1e-12..=1.0 + 1e-12).contains(&s);
    if !valid(s1) || !valid(s2) {
        return Err(HardyError::OutOfRange(format!(
            "no pair of state angles reaches p = {p} at w = {wv}"
        )));
    }
    let t1 = polish(s1.clamp(0.0, 1.0).asin(), p, wv);
    let t2 = polish(s2.clamp(0.0, 1.0).asin(), p, wv);
    Ok((t1.min(t2), t1.max(t2)))
}

/// `P(0,1|A0,B0)` of the optimal measurements at `sin θ = s`.
pub fn p01_at(s: f64) -> f64 {
    s.powi(3) / (2.0 * (2.0 - s).powi(2))
}

/// `P(1,1|A0,B0)` of the optimal measurements at `sin θ = s`.
pub fn p11_at(s: f64) -> f64 {
    let c = (1.0 - s * s).max(0.0).sqrt();
    0.5 + c * (2.0 + s) * (1.0 - s).max(0.0).sqrt() / (2.0 * (2.0 - s) * (1.0 + s).sqrt()) - p01_at(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GuessBranch {
    TangentMixture,
    PureUpperBranch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColoredNoisePoint {
    pub p: f64,
    pub guess_prob: f64,
    pub h_bits: f64,
    pub branch: GuessBranch,
}

/// The guessing-probability curve at a fixed `w`, with its tangent and
/// crossing points precomputed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColoredCurve {
    pub w: f64,
    pub quantum_max: f64,
    pub p_k: f64,
    pub p_0: f64,
    /// Whether `w` is the value at which the curve is known from the
    /// literature (the global-randomness breakpoint `w0`).
    pub validated: bool,
}

impl ColoredCurve {
    pub fn new(w: TiltParameter) -> Result<Self> {
        let (p_k, p_0) = tangent_point(w)?;
        let validated = (w.value() - crate::tilted::w0_closed_form()).abs() < 1e-12;
        Ok(ColoredCurve { w: w.value(), quantum_max: quantum_max(w), p_k, p_0, validated })
    }

    fn tilt(&self) -> TiltParameter {
        TiltParameter::new(self.w).expect("curve built from a valid tilt")
    }

    /// Tangent line through the deterministic point `(0, 1)`.
    pub fn tangent_line(&self, p: f64) -> f64 {
        let fk = upper_f(self.p_k, self.tilt()).expect("p_k lies in range");
        (fk - 1.0) / self.p_k * p + 1.0
    }

    pub fn guess(&self, p: f64) -> Result<ColoredNoisePoint> {
        if !(p >= 0.0) || p > self.quantum_max + 1e-12 {
            return Err(HardyError::OutOfRange(format!(
                "p = {p} is outside [0, {}]",
                self.quantum_max
            )));
        }
        let (g, branch) = if p <= self.p_0 {
            (self.tangent_line(p), GuessBranch::TangentMixture)
        } else {
            (upper_g(p, self.tilt())?, GuessBranch::PureUpperBranch)
        };
        Ok(ColoredNoisePoint { p, guess_prob: g, h_bits: -g.log2(), branch })
    }

    /// The curve sampled at `steps` evenly spaced points of `[0, quantum_max]`.
    pub fn sample(&self, steps: usize) -> Result<Vec<ColoredNoisePoint>> {
        let n = steps.max(2);
        (0..n)
            .map(|i| self.guess(self.quantum_max * i as f64 / (n - 1) as f64))
            .collect()
    }
}

/// `f(p)`: `P(0,1|A0,B0)` at the larger angle `θ2(p)`.
pub fn upper_f(p: f64, w: TiltParameter) -> Result<f64> {
    let (_, t2) = theta_solutions(p, w)?;
    Ok(p01_at(t2.sin()))
}

/// `g(p)`: `P(1,1|A0,B0)` at the smaller angle `θ1(p)`.
pub fn upper_g(p: f64, w: TiltParameter) -> Result<f64> {
    let (t1, _) = theta_solutions(p, w)?;
    Ok(p11_at(t1.sin()))
}

/// Tangent point `p_k` of the line from `(0, 1)` to the graph of `f`, and
/// the point `p_0` where that line meets `g`.
pub fn tangent_point(w: TiltParameter) -> Result<(f64, f64)> {
    let qmax = quantum_max(w);
    let f = |p: f64| upper_f(p, w).unwrap_or(f64::NAN);
    let g = |p: f64| upper_g(p, w).unwrap_or(f64::NAN);
    let resid = |p: f64| central_diff(&f, p, DIFF_STEP) * p + 1.0 - f(p);
    let lo = (qmax * 1e-3).max(10.0 * DIFF_STEP);
    let hi = qmax - 2.0 * DIFF_STEP;
    let (a, b) = bracket_scan(&resid, lo, hi, 2000).ok_or(HardyError::RootNotBracketed { lo, hi })?;
    let p_k = brent_root(resid, a, b, 1e-14)?;
    let fk = f(p_k);
    let line = |p: f64| (fk - 1.0) / p_k * p + 1.0;
    let lo0 = 1e-9 * qmax;
    let p_0 = brent_root(|p| line(p) - g(p), lo0, p_k, 1e-14)?;
    Ok((p_k, p_0))
}

/// Residual of the tangency condition at `p`.
pub fn tangent_residual(p: f64, w: TiltParameter) -> f64 {
    let f = |p: f64| upper_f(p, w).unwrap_or(f64::NAN);
    central_diff(&f, p, DIFF_STEP) * p + 1.0 - f(p)
}

pub fn guess_colored(p: f64, w: TiltParameter) -> Result<ColoredNoisePoint> {
    ColoredCurve::new(w)?.guess(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub w: f64,
    pub grid: usize,
    pub checked: usize,
    /// Largest `mixture - pure` over the grid; non-positive means dominance.
    pub max_violation: f64,
}

/// Checks that mixing the pure strategy at Hardy value `q` with the
/// deterministic box of Hardy value `w` never beats the pure strategy at
/// the mixed value `p`: `r g(q) + (1 - r) <= g(p)` with
/// `r = (p - w)/(q - w)`, over `0 <= p <= q <= quantum_max`.
pub fn verify_mixture_dominance(w: TiltParameter, grid: usize) -> Result<DominanceReport> {
    if grid < 10 {
        return Err(HardyError::OutOfRange(format!("grid = {grid} must be at least 10")));
    }
    let wv = w.value();
    let qmax = quantum_max(w);
    let mut worst = f64::NEG_INFINITY;
    let mut checked = 0;
    for i in 1..=grid {
        let q = qmax * i as f64 / grid as f64;
        let gq = upper_g(q, w)?;
        for j in 0..=grid {
            let p = q * j as f64 / grid as f64;
            let r = (p - wv) / (q - wv);
            let mixed = r * gq + (1.0 - r);
            worst = worst.max(mixed - upper_g(p, w)?);
            checked += 1;
        }
    }
    Ok(DominanceReport { w: wv, grid, checked, max_violation: worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::Scenario;
    use crate::quantum::xz_table;
    use crate::tilted::{canonical_observables, w0_closed_form};

    fn w0() -> TiltParameter {
        TiltParameter::new(w0_closed_form()).unwrap()
    }

    #[test]
    fn both_angles_reach_p() {
        let w = w0();
        let q = quantum_max(w);
        for k in 1..50 {
            let p = q * k as f64 / 50.0;
            let (t1, t2) = theta_solutions(p, w).unwrap();
            assert!((hardy_value(w.value(), t1) - p).abs() < 1e-9);
            assert!((hardy_value(w.value(), t2) - p).abs() < 1e-9);
            assert!(t1 < optimal_theta(w) && optimal_theta(w) < t2);
        }
    }

    #[test]
    fn angles_merge_at_maximum() {
        let w = w0();
        let (t1, t2) = theta_solutions(quantum_max(w), w).unwrap();
        assert_eq!(t1, t2);
        assert!((t1 - 1.1356).abs() < 1e-3);
    }

    #[test]
    fn small_p_limits() {
        let w = w0();
        let (t1, t2) = theta_solutions(1e-12, w).unwrap();
        assert!((t1.sin() - (-4.0 * w.value()).sqrt()).abs() < 1e-6);
        assert!((t2.sin() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_p_above_max() {
        let w = w0();
        assert!(theta_solutions(quantum_max(w) + 1e-6, w).is_err());
    }

    #[test]
    fn closed_form_entries_match_born_rule() {
        let sc = Scenario::CHSH;
        for s in [0.1, 0.5, 0.78, 0.95] {
            let obs = canonical_observables(s);
            let t = xz_table(f64::asin(s), &obs, &obs);
            assert!((t[sc.index(0, 1, 0, 0)] - p01_at(s)).abs() < 1e-12);
            assert!((t[sc.index(1, 1, 0, 0)] - p11_at(s)).abs() < 1e-12);
        }
    }

    #[test]
    fn tangent_constants() {
        let w = w0();
        let (pk, p0) = tangent_point(w).unwrap();
        assert!((pk - 0.01563).abs() < 2e-4, "p_k = {pk}");
        assert!((p0 - 0.01366).abs() < 2e-4, "p_0 = {p0}");
        assert!(tangent_residual(pk, w).abs() < 1e-9);
    }

    #[test]
    fn curve_shape() {
        let curve = ColoredCurve::new(w0()).unwrap();
        assert!(curve.validated);
        let pts = curve.sample(400).unwrap();
        assert_eq!(pts[0].guess_prob, 1.0);
        for pair in pts.windows(2) {
            assert!(pair[1].guess_prob <= pair[0].guess_prob + 1e-12);
        }
        let at = |p: f64| upper_g(p, w0()).unwrap();
        assert!((curve.tangent_line(curve.p_0) - at(curve.p_0)).abs() < 1e-8);
        let end = curve.guess(curve.quantum_max).unwrap();
        assert!((end.h_bits - crate::tilted::h_global(w0())).abs() < 1e-6);
    }

    #[test]
    fn mixtures_do_not_help() {
        let rep = verify_mixture_dominance(w0(), 40).unwrap();
        assert!(rep.max_violation <= 1e-9, "{rep:?}");
    }
}
