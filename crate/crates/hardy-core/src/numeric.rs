//! Thin wrappers around `argmin` for the one-dimensional root finding and
//! the derivative-free searches used throughout the crate.

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::brent::BrentRoot;
use argmin::solver::goldensectionsearch::GoldenSectionSearch;
use argmin::solver::neldermead::NelderMead;

use crate::error::{HardyError, Result};

struct Scalar<F>(F);

impl<F: Fn(f64) -> f64> CostFunction for Scalar<F> {
    type Param = f64;
    type Output = f64;

    fn cost(&self, p: &f64) -> std::result::Result<f64, argmin::core::Error> {
        Ok((self.0)(*p))
    }
}

struct Multi<F>(F);

impl<F: Fn(&[f64]) -> f64> CostFunction for Multi<F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        Ok((self.0)(p))
    }
}

/// Root of `f` on `[lo, hi]` by Brent's method. The endpoints must bracket a
/// sign change.
pub fn brent_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return Err(HardyError::RootNotBracketed { lo, hi });
    }
    let res = Executor::new(Scalar(f), BrentRoot::new(lo, hi, tol))
        .configure(|s| s.param(0.5 * (lo + hi)).max_iters(500))
        .run()?;
    res.state()
        .get_best_param()
        .copied()
        .ok_or_else(|| HardyError::Numerical("brent root returned no parameter".into()))
}

/// Scans `[lo, hi]` on `samples` points and returns the first sub-interval
/// whose endpoints straddle a sign change of `f`.
pub fn bracket_scan<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    samples: usize,
) -> Option<(f64, f64)> {
    let step = (hi - lo) / samples as f64;
    let mut prev = (lo, f(lo));
    for i in 1..=samples {
        let x = if i == samples { hi } else { lo + step * i as f64 };
        let fx = f(x);
        if prev.1.is_finite() && fx.is_finite() && prev.1.signum() != fx.signum() {
            return Some((prev.0, x));
        }
        prev = (x, fx);
    }
    None
}

/// Maximizer of a unimodal `f` on `[lo, hi]` by golden-section search.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)> {
    let neg = move |x: f64| -f(x);
    let solver = GoldenSectionSearch::new(lo, hi)?.with_tolerance(tol)?;
    let res = Executor::new(Scalar(neg), solver)
        .configure(|s| s.param(0.5 * (lo + hi)).max_iters(1000))
        .run()?;
    let state = res.state();
    let x = *state
        .get_best_param()
        .ok_or_else(|| HardyError::Numerical("golden section returned no parameter".into()))?;
    Ok((x, -state.get_best_cost()))
}

/// Maximizes `f` by Nelder-Mead started from the simplex `x0 + step * e_i`.
/// Returns the best point and its value.
pub fn nelder_mead_max<F: Fn(&[f64]) -> f64>(
    f: F,
    x0: &[f64],
    step: f64,
    sd_tol: f64,
    max_iters: u64,
) -> Result<(Vec<f64>, f64)> {
    let mut simplex = vec![x0.to_vec()];
    for i in 0..x0.len() {
        let mut v = x0.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let neg = move |x: &[f64]| -f(x);
    let solver = NelderMead::new(simplex).with_sd_tolerance(sd_tol)?;
    let res = Executor::new(Multi(neg), solver)
        .configure(|s| s.max_iters(max_iters))
        .run()?;
    let state = res.state();
    let x = state
        .get_best_param()
        .cloned()
        .ok_or_else(|| HardyError::Numerical("nelder-mead returned no parameter".into()))?;
    Ok((x, -state.get_best_cost()))
}

/// Central finite difference with step `h`.
pub fn central_diff<F: Fn(f64) -> f64>(f: &F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_sqrt2() {
        let r = brent_root(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn brent_rejects_unbracketed() {
        assert!(matches!(
            brent_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12),
            Err(HardyError::RootNotBracketed { .. })
        ));
    }

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, v) = golden_max(|x| -(x - 0.3) * (x - 0.3) + 1.0, 0.0, 1.0, 1e-10).unwrap();
        assert!((x - 0.3).abs() < 1e-6);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nelder_mead_finds_quadratic_peak() {
        let f = |x: &[f64]| -((x[0] - 1.0).powi(2) + 2.0 * (x[1] + 0.5).powi(2));
        let (x, v) = nelder_mead_max(f, &[0.0, 0.0], 0.5, 1e-14, 5000).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-5 && (x[1] + 0.5).abs() < 1e-5);
        assert!(v.abs() < 1e-10);
    }

    #[test]
    fn scan_brackets_first_crossing() {
        let (a, b) = bracket_scan(&|x: f64| (x - 0.25) * (x - 0.75), 0.0, 1.0, 100).unwrap();
        assert!(a <= 0.25 && 0.25 <= b);
    }
}
