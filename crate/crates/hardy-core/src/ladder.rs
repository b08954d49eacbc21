//! The ladder Hardy test with inputs `0..=N` per party and `2N + 1` zero
//! constraints, evaluated on its closed-form two-qubit distribution.

use serde::{Deserialize, Serialize};

use crate::bell::{Behavior, Scenario};
use crate::error::{HardyError, Result};
use crate::numeric::golden_max;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderParams {
    n: usize,
    t: f64,
}

impl LadderParams {
    pub fn new(n: usize, t: f64) -> Result<Self> {
        if n == 0 {
            return Err(HardyError::OutOfRange("the ladder needs N >= 1".into()));
        }
        if !(t > 0.0 && t < 1.0) {
            return Err(HardyError::OutOfRange(format!("t = {t} is outside (0, 1)")));
        }
        Ok(LadderParams { n, t })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn scenario(&self) -> Scenario {
        Scenario::new(self.n + 1, self.n + 1, 2, 2)
    }
}

fn sign(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `P(a,b|x,y)` of the ladder strategy with Schmidt ratio `t`.
pub fn ladder_prob(params: &LadderParams, a: usize, b: usize, x: usize, y: usize) -> f64 {
    let t = params.t;
    let n = params.n as i64;
    let (xi, yi) = (x as i64, y as i64);
    let pw = |k: i64| t.powi(k as i32);
    let den = (1.0 + pw(2 * xi + 1)) * (1.0 + pw(2 * yi + 1));
    let pre = t * t / (1.0 + t * t);
    match (a, b) {
        (0, 0) => pre * (1.0 - sign(2 * n - xi - yi) * pw(xi + yi)).powi(2) / den,
        (0, 1) => pre * (1.0 + sign(yi - xi) * pw(xi - yi - 1)).powi(2) * pw(2 * yi + 1) / den,
        (1, 0) => pre * (1.0 + sign(xi - yi) * pw(yi - xi - 1)).powi(2) * pw(2 * xi + 1) / den,
        (1, 1) => (1.0 - sign(2 * n - xi - yi) * pw(xi + yi + 2)).powi(2) / ((1.0 + t * t) * den),
        _ => panic!("binary outcomes only, got ({a}, {b})"),
    }
}

pub fn ladder_behavior(params: &LadderParams) -> Result<Behavior> {
    Behavior::from_fn(params.scenario(), |a, b, x, y| ladder_prob(params, a, b, x, y))
}

/// The `2N + 1` zero constraints as `(a, b, x, y)` entries.
pub fn ladder_zeros(n: usize) -> Vec<(usize, usize, usize, usize)> {
    let mut z = Vec::with_capacity(2 * n + 1);
    for k in 1..=n {
        z.push((0, 1, k, k - 1));
        z.push((1, 0, k - 1, k));
    }
    z.push((0, 0, 0, 0));
    z
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderHardy {
    /// `P(0,0|A_N,B_N)` from the full distribution.
    pub value: f64,
    /// The simplified expression `t²/(1+t²) (1-t^{2N})/(1+t^{2N+1})` as it
    /// is usually printed, which lacks the squares of the full distribution.
    pub printed_form: f64,
    pub forms_agree: bool,
}

pub fn ladder_printed_form(params: &LadderParams) -> f64 {
    let t = params.t;
    let n = params.n as i32;
    t * t / (1.0 + t * t) * (1.0 - t.powi(2 * n)) / (1.0 + t.powi(2 * n + 1))
}

pub fn ladder_hardy_prob(params: &LadderParams) -> LadderHardy {
    let value = ladder_prob(params, 0, 0, params.n, params.n);
    let printed_form = ladder_printed_form(params);
    LadderHardy { value, printed_form, forms_agree: (value - printed_form).abs() < 1e-12 }
}

/// Maximizer of the Hardy probability over `t`, by a coarse scan followed
/// by golden-section search on the bracketing cell.
pub fn ladder_optimal_t(n: usize) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(HardyError::OutOfRange("the ladder needs N >= 1".into()));
    }
    let f = |t: f64| {
        let t = t.clamp(1e-12, 1.0 - 1e-12);
        ladder_prob(&LadderParams { n, t }, 0, 0, n, n)
    };
    let m = 400;
    let grid = |i: usize| i as f64 / m as f64;
    let best = (1..m).max_by(|&i, &j| f(grid(i)).total_cmp(&f(grid(j)))).expect("non-empty grid");
    let (t, p) = golden_max(f, grid(best - 1), grid(best + 1), 1e-11)?;
    Ok((t, p))
}

/// Min-entropy `-log2 max_ab P(a,b|A_N,B_0)`.
pub fn ladder_global_randomness(params: &LadderParams) -> f64 {
    let pmax = (0..2)
        .flat_map(|a| (0..2).map(move |b| (a, b)))
        .map(|(a, b)| ladder_prob(params, a, b, params.n, 0))
        .fold(0.0, f64::max);
    -pmax.log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_zero_at_n1() {
        let p = LadderParams::new(1, 0.46).unwrap();
        assert_eq!(ladder_prob(&p, 0, 1, 1, 0), 0.0);
        for (a, b, x, y) in ladder_zeros(1) {
            assert!(ladder_prob(&p, a, b, x, y).abs() < 1e-15);
        }
    }

    #[test]
    fn settings_normalize() {
        let p = LadderParams::new(2, 0.5).unwrap();
        let s: f64 = (0..2).flat_map(|a| (0..2).map(move |b| (a, b))).map(|(a, b)| ladder_prob(&p, a, b, 1, 2)).sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert!(ladder_behavior(&p).is_ok());
    }

    #[test]
    fn n1_is_the_original_hardy_test() {
        let (t, v) = ladder_optimal_t(1).unwrap();
        assert!((v - (5.0 * 5f64.sqrt() - 11.0) / 2.0).abs() < 1e-9, "t={t} v={v}");
        let p = LadderParams::new(1, 0.46).unwrap();
        assert!((ladder_hardy_prob(&p).value - 0.09015).abs() < 1e-4);
    }

    #[test]
    fn large_n_limit_at_fixed_t() {
        let t: f64 = 0.7;
        let p = LadderParams::new(200, t).unwrap();
        assert!((ladder_hardy_prob(&p).value - t * t / (1.0 + t * t)).abs() < 1e-12);
    }

    #[test]
    fn printed_form_differs() {
        let p = LadderParams::new(3, 0.8).unwrap();
        assert!(!ladder_hardy_prob(&p).forms_agree);
    }

    #[test]
    fn finite_n_randomness_below_two_bits() {
        let p = LadderParams::new(1, 0.46).unwrap();
        assert!(ladder_global_randomness(&p) < 2.0);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(LadderParams::new(0, 0.5).is_err());
        assert!(LadderParams::new(1, 1.0).is_err());
        assert!(LadderParams::new(1, 0.0).is_err());
    }
}
