//! The correlator Bell expression
//! `I_w = (1+w)A0B0 + A0B1 + A1B0 - A1B1 - w(A0 + B0)`:
//! classical bound, quantum maximum from the stationarity conditions, and a
//! direct numeric maximization of the Bell operator's top eigenvalue.

use std::f64::consts::PI;

use nalgebra::{Complex, Matrix2, Matrix4, Vector4};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bell::{iw_functional, Behavior, BellFunctional, Scenario};
use crate::error::{HardyError, Result};
use crate::numeric::{central_diff, nelder_mead_max};

type C = Complex<f64>;

/// Below this `|w|` the closed form divides by (almost) zero.
pub const SINGULAR_W: f64 = 1e-4;
/// Points per axis of the coarse `(α1, β1)` grid over `[-π, π]²`.
pub const GRID_POINTS: usize = 721;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IwSpec {
    pub w: f64,
    pub functional: BellFunctional,
}

impl IwSpec {
    pub fn new(w: f64) -> Result<Self> {
        if !(w > -0.25 && w < 1.0) {
            return Err(HardyError::OutOfRange(format!("w = {w} is outside (-1/4, 1)")));
        }
        Ok(IwSpec { w, functional: iw_functional(w) })
    }
}

/// `2 - w` for `w < 0`, `3w + 2` for `w > 0`.
pub fn iw_classical(w: f64) -> f64 {
    if w < 0.0 {
        2.0 - w
    } else {
        3.0 * w + 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KktCase {
    /// `α1 = β1 = π`.
    Case1,
    /// `β1 = π`, `α1` free.
    Case2,
    /// `α1 = π`, `β1` free.
    Case3,
    /// Interior stationary point with `α1 = β1`.
    Case4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KktCandidate {
    pub index: usize,
    pub cos_alpha1: f64,
    /// `None` when `|cos α1| > 1` or the square root has a negative argument.
    pub lambda: Option<f64>,
    /// Newton distance `|F(λ)/F'(λ)|` to the nearest root of the reduced
    /// eigen-equation `F` at `α1`.
    pub residual: Option<f64>,
    /// Feasible and a genuine root of the reduced eigen-equation.
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KktSolution {
    pub w: f64,
    pub lambda_max: f64,
    pub alpha1: f64,
    pub case: KktCase,
    pub candidate_index: usize,
    pub candidates: Vec<KktCandidate>,
    /// The candidate singled out by the rule "index 4 for `w > 0`, index 5
    /// for `w < 0`", and its value.
    pub rule_index: usize,
    pub rule_lambda: Option<f64>,
    /// Whether the rule's pick coincides with the verified maximum.
    pub rule_agrees: bool,
}

/// The five closed-form stationary values of `cos α1`.
pub fn kkt_cos_candidates(w: f64) -> [f64; 5] {
    let a = 2.0 * (21.0 * w.powi(4) + 6.0 * w.powi(3) - 3.0 * w * w + 12.0 * w + 4.0).sqrt();
    let t = (4.0 - 9.0 * w * w) / a
        + 12.0 * w * (5.0 * w.powi(3) + 22.0 * w * w + 28.0 * w + 8.0) / a.powi(3);
    let b = t.clamp(-1.0, 1.0).acos() / 3.0;
    let base = 9.0 * w * w - 4.0;
    let den = 3.0 * (2.0 + w).powi(2);
    [
        -1.0,
        -w / (2.0 + w),
        (base - 2.0 * a * b.cos()) / den,
        (base + 2.0 * a * (PI / 6.0 + b).sin()) / den,
        (base + 2.0 * a * (PI / 6.0 - b).sin()) / den,
    ]
}

/// `λ = -w + sqrt(4 + 8(w+1)/w (1 + c) c)` at `c = cos α1`.
pub fn kkt_lambda(w: f64, c: f64) -> Option<f64> {
    let rad = 4.0 + 8.0 * (w + 1.0) / w * (1.0 + c) * c;
    (rad >= 0.0 && c.abs() <= 1.0 + 1e-12).then(|| -w + rad.sqrt())
}

/// Characteristic quartic of the Bell operator for general `(α1, β1)`.
pub fn eigen_equation(lambda: f64, w: f64, a: f64, b: f64) -> f64 {
    let l = lambda;
    let pm = (l + w - 2.0) * (l + w + 2.0);
    let sa2 = (0.5 * a).sin().powi(2);
    let s2a = a.sin().powi(2);
    l.powi(4) - 2.0 * (4.0 + w * (2.0 + 3.0 * w)) * l * l - 8.0 * w * w * (1.0 + w) * l
        - 4.0 * w * pm * a.cos()
        - 8.0 * w * pm * b.cos() * sa2
        + w * (12.0 + w * (8.0 - w * (4.0 + 3.0 * w)))
        + 12.0
        + 4.0 * (1.0 + w) * (2.0 * a).cos()
        + 8.0 * (2.0 * b).cos() * s2a
        + 8.0 * w * (2.0 * b).cos() * s2a
}

/// Characteristic quartic restricted to `α1 = β1`.
pub fn eigen_equation_diag(lambda: f64, w: f64, a: f64) -> f64 {
    let l = lambda;
    l.powi(4) - 2.0 * (4.0 + w + 3.0 * w * w) * l * l - 4.0 * w * w * (1.0 + 2.0 * w) * l
        - 8.0 * w * (l + w + 2.0) * (l + w - 2.0) * a.cos()
        + 2.0 * (w * (l + w).powi(2) + 4.0) * (2.0 * a).cos()
        + w * (2.0 - w * (w + 2.0) * (3.0 * w - 4.0))
        - 2.0 * (w + 1.0) * (4.0 * a).cos()
        + 10.0
}

const ROOT_TOL: f64 = 1e-6;

pub fn iw_quantum_kkt(w: f64) -> Result<KktSolution> {
    if !(w > -0.25 && w < 1.0) {
        return Err(HardyError::OutOfRange(format!("w = {w} is outside (-1/4, 1)")));
    }
    if w.abs() <= SINGULAR_W {
        return Err(HardyError::SingularW(w));
    }
    let candidates: Vec<KktCandidate> = kkt_cos_candidates(w)
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let lambda = kkt_lambda(w, c);
            let residual = lambda.map(|l| {
                let a = c.clamp(-1.0, 1.0).acos();
                let f = |x: f64| eigen_equation_diag(x, w, a);
                let slope = central_diff(&f, l, 1e-6);
                f(l).abs() / slope.abs().max(1e-300)
            });
            KktCandidate {
                index: i + 1,
                cos_alpha1: c,
                lambda,
                residual,
                verified: residual.is_some_and(|r| r < ROOT_TOL),
            }
        })
        .collect();

    // Boundary cases reduce to the classical value.
    let mut best = (iw_classical(w), PI, KktCase::Case1, 1usize);
    for c in candidates.iter().filter(|c| c.verified) {
        let l = c.lambda.expect("verified candidates carry a value");
        if l > best.0 + 1e-12 {
            best = (l, c.cos_alpha1.clamp(-1.0, 1.0).acos(), KktCase::Case4, c.index);
        }
    }
    let rule_index = if w > 0.0 { 4 } else { 5 };
    let rule = &candidates[rule_index - 1];
    let rule_agrees = rule.verified && rule.lambda.is_some_and(|l| (l - best.0).abs() < 1e-10);
    Ok(KktSolution {
        w,
        lambda_max: best.0,
        alpha1: best.1,
        case: best.2,
        candidate_index: best.3,
        rule_index,
        rule_lambda: rule.lambda,
        rule_agrees,
        candidates,
    })
}

fn pauli_x() -> Matrix2<C> {
    Matrix2::new(C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 0.0))
}

/// `[[0, e^{-iφ}], [e^{iφ}, 0]]`, an observable in the X-Y plane.
pub fn xy_observable(phi: f64) -> Matrix2<C> {
    let z = C::new(0.0, 0.0);
    Matrix2::new(z, C::from_polar(1.0, -phi), C::from_polar(1.0, phi), z)
}

fn kron(a: &Matrix2<C>, b: &Matrix2<C>) -> Matrix4<C> {
    Matrix4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

/// Bell operator of `I_w` with `A0 = B0 = X`, `A1`, `B1` in the X-Y plane.
pub fn bell_operator(w: f64, alpha1: f64, beta1: f64) -> Matrix4<C> {
    let x = pauli_x();
    let id = Matrix2::<C>::identity();
    let a1 = xy_observable(alpha1);
    let b1 = xy_observable(beta1);
    let r = |v: f64| C::new(v, 0.0);
    kron(&x, &x) * r(1.0 + w) + kron(&x, &b1) + kron(&a1, &x) - kron(&a1, &b1)
        - (kron(&x, &id) + kron(&id, &x)) * r(w)
}

pub fn eigenvalues(m: &Matrix4<C>) -> [f64; 4] {
    let mut e: [f64; 4] = m.symmetric_eigenvalues().as_slice().try_into().expect("4 eigenvalues");
    e.sort_by(f64::total_cmp);
    e
}

pub fn top_eigenvalue(w: f64, alpha1: f64, beta1: f64) -> f64 {
    eigenvalues(&bell_operator(w, alpha1, beta1))[3]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericOptimum {
    pub lambda_max: f64,
    /// Representative with `α1, β1 >= 0` (the spectrum is even in each).
    pub alpha1: f64,
    pub beta1: f64,
    pub symmetric: bool,
}

/// Maximizes the top eigenvalue over a `GRID_POINTS²` grid on `[-π, π]²`,
/// then refines the best few grid points by Nelder-Mead.
pub fn iw_quantum_numeric(w: f64) -> Result<NumericOptimum> {
    iw_quantum_numeric_grid(w, GRID_POINTS)
}

pub fn iw_quantum_numeric_grid(w: f64, n: usize) -> Result<NumericOptimum> {
    if !(w > -0.25 && w < 1.0) {
        return Err(HardyError::OutOfRange(format!("w = {w} is outside (-1/4, 1)")));
    }
    let n = n.max(3);
    let step = 2.0 * PI / (n - 1) as f64;
    let coord = |i: usize| -PI + step * i as f64;
    let mut cells: Vec<(f64, usize, usize)> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / n, k % n);
            (top_eigenvalue(w, coord(i), coord(j)), i, j)
        })
        .collect();
    // Keep several seeds: the maximum comes in sign-mirrored pairs.
    cells.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut best: Option<(f64, f64, f64)> = None;
    for &(_, i, j) in cells.iter().take(4) {
        let (x, v) = nelder_mead_max(
            |p| top_eigenvalue(w, p[0], p[1]),
            &[coord(i), coord(j)],
            step,
            1e-15,
            5_000,
        )?;
        if best.is_none_or(|b| v > b.0) {
            best = Some((v, x[0], x[1]));
        }
    }
    let (lambda_max, a, b) = best.expect("at least one seed");
    let wrap = |t: f64| (t + PI).rem_euclid(2.0 * PI) - PI;
    let (alpha1, beta1) = (wrap(a).abs(), wrap(b).abs());
    Ok(NumericOptimum { lambda_max, alpha1, beta1, symmetric: (alpha1 - beta1).abs() < 1e-6 })
}

/// Behavior of the shared state `psi` (basis `|ab>`) under `±1`-valued
/// observables, outcome `k` projecting on `(I + (-1)^k O)/2`.
pub fn qubit_behavior(psi: &Vector4<C>, alice: &[Matrix2<C>; 2], bob: &[Matrix2<C>; 2]) -> Result<Behavior> {
    let id = Matrix2::<C>::identity();
    let proj = |o: &Matrix2<C>, k: usize| {
        let s = if k == 0 { 1.0 } else { -1.0 };
        (id + o * C::new(s, 0.0)) * C::new(0.5, 0.0)
    };
    let s = Scenario::CHSH;
    let mut t = vec![0.0; 16];
    for x in 0..2 {
        for y in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    let m = kron(&proj(&alice[x], a), &proj(&bob[y], b));
                    t[s.index(a, b, x, y)] = (psi.adjoint() * m * psi)[(0, 0)].re;
                }
            }
        }
    }
    Behavior::with_tolerance(s, t, 1e-10, 1e-10)
}

/// A two-qubit strategy attaining `λ_max`: the top eigenvector of the Bell
/// operator at the numeric optimum with the corresponding measurements.
pub fn iw_explicit_behavior(w: f64) -> Result<(f64, Behavior)> {
    let opt = iw_quantum_numeric(w)?;
    let op = bell_operator(w, opt.alpha1, opt.beta1);
    let eig = op.symmetric_eigen();
    let k = (0..4)
        .max_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]))
        .expect("4 eigenvalues");
    let psi: Vector4<C> = eig.eigenvectors.column(k).into_owned();
    let x = pauli_x();
    let p = qubit_behavior(&psi, &[x, xy_observable(opt.alpha1)], &[x, xy_observable(opt.beta1)])?;
    Ok((opt.lambda_max, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::classical_bound;

    #[test]
    fn classical_matches_enumeration() {
        for w in [-0.2, -0.1, 0.0, 0.3, 0.44, 0.9] {
            let (v, _) = classical_bound(&iw_functional(w)).unwrap();
            assert!((v - iw_classical(w)).abs() < 1e-12);
        }
    }

    #[test]
    fn case1_spectrum() {
        for w in [-0.2, 0.44] {
            let e = eigenvalues(&bell_operator(w, PI, PI));
            let mut want = [-w - 2.0, -w + 2.0, w - 2.0 * (1.0 - w), w + 2.0 * (1.0 - w)];
            want.sort_by(f64::total_cmp);
            for (a, b) in e.iter().zip(&want) {
                assert!((a - b).abs() < 1e-12, "{e:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn quartic_is_the_characteristic_polynomial() {
        for (w, a, b) in [(-0.2, 1.2, 0.7), (0.44, -2.0, 0.3), (0.9, 0.1, 3.0)] {
            for l in eigenvalues(&bell_operator(w, a, b)) {
                assert!(eigen_equation(l, w, a, b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn singular_w_is_refused() {
        assert_eq!(iw_quantum_kkt(0.0), Err(HardyError::SingularW(0.0)));
        assert!(matches!(iw_quantum_kkt(2.0), Err(HardyError::OutOfRange(_))));
    }

    #[test]
    fn kkt_matches_numeric() {
        for w in [-0.2, 0.44] {
            let k = iw_quantum_kkt(w).unwrap();
            let n = iw_quantum_numeric_grid(w, 181).unwrap();
            assert!((k.lambda_max - n.lambda_max).abs() < 1e-8, "{k:?} {n:?}");
            assert!(n.symmetric);
            assert!(k.lambda_max > iw_classical(w));
        }
    }

    #[test]
    fn chsh_limit() {
        let n = iw_quantum_numeric_grid(1e-9, 181).unwrap();
        assert!((n.lambda_max - 2.0 * 2f64.sqrt()).abs() < 1e-6);
    }
}
