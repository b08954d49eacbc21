//! Bell-value maximization over the level-2 set and the guessing-probability
//! programs with an eavesdropper.

use hardy_core::bell::{iw_functional, BellFunctional};
use hardy_core::iw::iw_classical;
use hardy_core::nosignaling::{tilde_mdl_functional, tilde_mdl_threshold, SeedBounds};
use serde::{Deserialize, Serialize};

use crate::problem::{build_npa2, ConstraintKind, MomentProblem, NpaScenario, Sense};
use crate::solver::{SdpResult, SdpSolver};
use crate::{NpaError, Result};

/// Slack on each side of an equality Bell-value constraint.
pub const VALUE_SLACK: f64 = 1e-9;

pub fn functional_problem(f: &BellFunctional) -> Result<MomentProblem> {
    let mut p = build_npa2(&NpaScenario::BIPARTITE)?;
    let obj = p.functional_expr(f)?;
    p.set_objective(obj, Sense::Maximize);
    Ok(p)
}

/// Upper bound on the quantum value of a bipartite functional.
pub fn max_functional_q2(f: &BellFunctional, solver: &dyn SdpSolver) -> Result<SdpResult> {
    solver.solve(&functional_problem(f)?)?.checked()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ValueConstraint {
    /// `I_w = value` up to the slack.
    Equal,
    /// `I_w >= value`.
    AtLeast,
}

/// Eve guesses `(a, b)` by her outcome `e = 2a + b`.
pub fn guess_problem(w: f64, iw_value: f64, setting: (usize, usize), mode: ValueConstraint) -> Result<MomentProblem> {
    if setting.0 > 1 || setting.1 > 1 {
        return Err(NpaError::Core(hardy_core::HardyError::OutOfRange(format!("setting {setting:?}"))));
    }
    let mut p = build_npa2(&NpaScenario::TRIPARTITE)?;
    let (x, y) = setting;
    let mut obj = crate::monomial::Poly::zero();
    for a in 0..2 {
        for b in 0..2 {
            obj = obj.add(&p.prob_poly_eve(a, b, 2 * a + b, x, y)?);
        }
    }
    let obj = p.expr(&obj)?;
    p.set_objective(obj, Sense::Maximize);
    let bell = p.functional_expr(&iw_functional(w))?;
    match mode {
        ValueConstraint::Equal => {
            p.add_constraint(bell.clone(), ConstraintKind::Ge, iw_value - VALUE_SLACK);
            p.add_constraint(bell, ConstraintKind::Le, iw_value + VALUE_SLACK);
        }
        ValueConstraint::AtLeast => p.add_constraint(bell, ConstraintKind::Ge, iw_value),
    }
    Ok(p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuessResult {
    pub w: f64,
    pub iw_value: f64,
    pub setting: (usize, usize),
    pub guess: f64,
    pub min_entropy: f64,
    pub sdp: SdpResult,
}

fn entropy(guess: f64) -> f64 {
    (-guess.min(1.0).log2()).max(0.0)
}

/// Eve's optimal guessing probability for `(A_x, B_y)` given `I_w = iw_value`.
pub fn guess_prob_vs_iw(
    w: f64,
    iw_value: f64,
    setting: (usize, usize),
    solver: &dyn SdpSolver,
) -> Result<GuessResult> {
    hardy_core::iw::IwSpec::new(w)?;
    let sdp = solver.solve(&guess_problem(w, iw_value, setting, ValueConstraint::Equal)?)?.checked()?;
    let guess = sdp.value;
    Ok(GuessResult { w, iw_value, setting, guess, min_entropy: entropy(guess), sdp })
}

/// How `h` follows from `l` for a seed whose four input pairs share the
/// probability mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HRule {
    /// `h = 1 - 3l`.
    Sum,
    /// `h = (1 - l) / 3`.
    Third,
}

impl HRule {
    pub fn h(&self, l: f64) -> f64 {
        match self {
            HRule::Sum => 1.0 - 3.0 * l,
            HRule::Third => (1.0 - l) / 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub l: f64,
    pub h: f64,
    pub tilde_max: f64,
    pub threshold: f64,
    pub guess: f64,
    pub min_entropy: f64,
}

/// One point of the weak-seed rate curve: bound the worst-case MDL
/// functional over the level-2 set, convert it to an `I_w` threshold and
/// bound Eve's guess subject to `I_w >=` that threshold.
pub fn mdl_rate_point(w: f64, l: f64, rule: HRule, setting: (usize, usize), solver: &dyn SdpSolver) -> Result<CurvePoint> {
    hardy_core::iw::IwSpec::new(w)?;
    if !(l > 0.0 && l <= 0.25) {
        return Err(NpaError::Core(hardy_core::HardyError::OutOfRange(format!("l = {l} is outside (0, 1/4]"))));
    }
    let h = rule.h(l).max(l);
    let bounds = SeedBounds { l, h, epsilon: None };
    let tilde_max = max_functional_q2(&tilde_mdl_functional(w, &bounds), solver)?.value;
    let threshold = tilde_mdl_threshold(tilde_max, w, &bounds);
    let (guess, min_entropy) = if threshold <= iw_classical(w) {
        (1.0, 0.0)
    } else {
        let p = guess_problem(w, threshold, setting, ValueConstraint::AtLeast)?;
        let g = solver.solve(&p)?.checked()?.value;
        (g, entropy(g))
    };
    Ok(CurvePoint { l, h, tilde_max, threshold, guess, min_entropy })
}

pub fn mdl_rate_curve(
    w: f64,
    l_grid: &[f64],
    rule: HRule,
    setting: (usize, usize),
    solver: &dyn SdpSolver,
) -> Result<Vec<CurvePoint>> {
    l_grid.iter().map(|&l| mdl_rate_point(w, l, rule, setting, solver)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::ClarabelSolver;

    #[test]
    fn chsh_reaches_tsirelson() {
        let r = max_functional_q2(&iw_functional(0.0), &ClarabelSolver::default()).unwrap();
        assert!((r.value - 2.0 * 2f64.sqrt()).abs() < 1e-6, "{}", r.value);
    }

    #[test]
    fn rules_meet_at_uniform() {
        assert_eq!(HRule::Sum.h(0.25), 0.25);
        assert!((HRule::Third.h(0.25) - 0.25).abs() < 1e-15);
    }
}
