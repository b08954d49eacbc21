//! Level-2 moment matrices and the linear data attached to them.

use std::collections::HashMap;

use hardy_core::bell::{BellFunctional, Behavior, Scenario};
use serde::{Deserialize, Serialize};

use crate::monomial::{projector, Monomial, Party, Poly, Symbol};
use crate::{NpaError, Result};

/// Tolerance for reading probabilities back out of solver moments.
pub const SOLVER_TOL: f64 = 1e-5;

/// Measurement layout of the parties taking part in a relaxation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartySpec {
    pub inputs: u8,
    pub outcomes: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NpaScenario {
    pub alice: PartySpec,
    pub bob: PartySpec,
    pub eve: Option<PartySpec>,
}

impl NpaScenario {
    pub const BIPARTITE: NpaScenario = NpaScenario {
        alice: PartySpec { inputs: 2, outcomes: 2 },
        bob: PartySpec { inputs: 2, outcomes: 2 },
        eve: None,
    };

    /// Alice and Bob plus one four-outcome measurement for Eve.
    pub const TRIPARTITE: NpaScenario = NpaScenario { eve: Some(PartySpec { inputs: 1, outcomes: 4 }), ..Self::BIPARTITE };

    fn spec(&self, party: Party) -> Option<PartySpec> {
        match party {
            Party::A => Some(self.alice),
            Party::B => Some(self.bob),
            Party::E => self.eve,
        }
    }

    /// Independent projectors, in basis order.
    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        for party in [Party::A, Party::B, Party::E] {
            if let Some(sp) = self.spec(party) {
                for x in 0..sp.inputs {
                    for o in 0..sp.outcomes - 1 {
                        out.push(Symbol::new(party, x, o));
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstraintKind {
    Eq,
    Le,
    Ge,
}

/// Linear form `Σ c_k y_k` in the moments, where `y_0 = 1`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MomentExpr {
    pub terms: Vec<(usize, f64)>,
}

impl MomentExpr {
    pub fn constant(&self) -> f64 {
        self.terms.iter().filter(|(k, _)| *k == 0).map(|(_, c)| c).sum()
    }

    pub fn eval(&self, moments: &[f64]) -> f64 {
        self.terms.iter().map(|&(k, c)| c * moments[k]).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub expr: MomentExpr,
    pub kind: ConstraintKind,
    pub rhs: f64,
}

/// A moment matrix indexed by words of length at most two, plus linear
/// constraints and an objective in its moments.
#[derive(Debug, Clone)]
pub struct MomentProblem {
    pub scenario: NpaScenario,
    pub basis: Vec<Monomial>,
    /// Distinct moments; index 0 is the identity.
    pub moments: Vec<Monomial>,
    /// Row-major moment index of each matrix cell, `None` for vanishing words.
    pub matrix: Vec<Option<usize>>,
    pub constraints: Vec<LinearConstraint>,
    pub objective: MomentExpr,
    pub sense: Sense,
    lookup: HashMap<Monomial, usize>,
}

/// Canonical words of length at most two over the independent projectors.
pub fn level2_basis(scenario: &NpaScenario) -> Vec<Monomial> {
    let syms = scenario.symbols();
    let mut basis = vec![Monomial::identity()];
    let push = |m: Option<Monomial>, basis: &mut Vec<Monomial>| {
        if let Some(m) = m {
            if !basis.contains(&m) {
                basis.push(m);
            }
        }
    };
    for &s in &syms {
        push(Monomial::canonical(&[s]), &mut basis);
    }
    // Same-party products first, then cross-party ones.
    for same in [true, false] {
        for &s in &syms {
            for &t in &syms {
                if (s.party == t.party) == same && s != t {
                    push(Monomial::canonical(&[s, t]), &mut basis);
                }
            }
        }
    }
    basis
}

/// Assembles the level-2 relaxation for the bipartite CHSH scenario or its
/// extension with a single four-outcome measurement for Eve.
pub fn build_npa2(scenario: &NpaScenario) -> Result<MomentProblem> {
    let binary = PartySpec { inputs: 2, outcomes: 2 };
    let eve_ok = match scenario.eve {
        None => true,
        Some(e) => e.inputs == 1 && e.outcomes == 4,
    };
    if scenario.alice != binary || scenario.bob != binary || !eve_ok {
        return Err(NpaError::UnsupportedScenario(format!("{scenario:?}")));
    }
    let basis = level2_basis(scenario);
    let n = basis.len();
    let mut moments = vec![Monomial::identity()];
    let mut lookup = HashMap::from([(Monomial::identity(), 0)]);
    let mut matrix = Vec::with_capacity(n * n);
    for bi in &basis {
        for bj in &basis {
            let cell = bi.adjoint().mul(bj).map(|w| {
                let key = w.moment_key();
                *lookup.entry(key.clone()).or_insert_with(|| {
                    moments.push(key);
                    moments.len() - 1
                })
            });
            matrix.push(cell);
        }
    }
    Ok(MomentProblem {
        scenario: *scenario,
        basis,
        moments,
        matrix,
        constraints: Vec::new(),
        objective: MomentExpr::default(),
        sense: Sense::Maximize,
        lookup,
    })
}

impl MomentProblem {
    pub fn size(&self) -> usize {
        self.basis.len()
    }

    pub fn cell(&self, i: usize, j: usize) -> Option<usize> {
        self.matrix[i * self.size() + j]
    }

    pub fn moment_index(&self, m: &Monomial) -> Option<usize> {
        self.lookup.get(&m.moment_key()).copied()
    }

    /// Writes a polynomial in terms of the moments. Fails if a word is not
    /// represented in the matrix.
    pub fn expr(&self, p: &Poly) -> Result<MomentExpr> {
        let mut acc: Vec<f64> = vec![0.0; self.moments.len()];
        for (m, c) in p.terms() {
            let k = self.moment_index(m).ok_or_else(|| NpaError::MissingMoment(m.to_string()))?;
            acc[k] += c;
        }
        Ok(MomentExpr { terms: acc.into_iter().enumerate().filter(|(_, c)| *c != 0.0).collect() })
    }

    fn spec(&self, party: Party) -> PartySpec {
        self.scenario.spec(party).expect("party present in the scenario")
    }

    /// `P(a,b|x,y)` as a polynomial.
    pub fn prob_poly(&self, a: usize, b: usize, x: usize, y: usize) -> Poly {
        let (sa, sb) = (self.spec(Party::A), self.spec(Party::B));
        projector(Party::A, x as u8, a as u8, sa.outcomes).mul(&projector(Party::B, y as u8, b as u8, sb.outcomes))
    }

    /// `P(a,b,e|x,y)` with Eve's single measurement.
    pub fn prob_poly_eve(&self, a: usize, b: usize, e: usize, x: usize, y: usize) -> Result<Poly> {
        let se = self.scenario.eve.ok_or_else(|| NpaError::UnsupportedScenario("no eavesdropper".into()))?;
        Ok(self.prob_poly(a, b, x, y).mul(&projector(Party::E, 0, e as u8, se.outcomes)))
    }

    /// A bipartite Bell functional as a linear form in the moments.
    pub fn functional_expr(&self, f: &BellFunctional) -> Result<MomentExpr> {
        let s = f.scenario();
        if s != Scenario::CHSH {
            return Err(NpaError::UnsupportedScenario(format!("functional over {s:?}")));
        }
        let joint = f.to_joint_form();
        let mut p = Poly::constant(joint.offset());
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        let c = joint.joint(a, b, x, y);
                        if c != 0.0 {
                            p = p.add(&self.prob_poly(a, b, x, y).scale(c));
                        }
                    }
                }
            }
        }
        self.expr(&p)
    }

    pub fn add_constraint(&mut self, expr: MomentExpr, kind: ConstraintKind, rhs: f64) {
        self.constraints.push(LinearConstraint { expr, kind, rhs });
    }

    pub fn set_objective(&mut self, objective: MomentExpr, sense: Sense) {
        self.objective = objective;
        self.sense = sense;
    }

    /// The Alice-Bob behavior encoded in a vector of moments.
    pub fn behavior(&self, moments: &[f64]) -> Result<Behavior> {
        let mut t = Vec::with_capacity(16);
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        let v = self.expr(&self.prob_poly(a, b, x, y))?.eval(moments);
                        // Solver noise can leave entries slightly negative.
                        t.push(if v > -SOLVER_TOL { v.max(0.0) } else { v });
                    }
                }
            }
        }
        Behavior::with_tolerance(Scenario::CHSH, t, SOLVER_TOL, SOLVER_TOL).map_err(NpaError::from)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bipartite_basis_has_thirteen_words() {
        let b = level2_basis(&NpaScenario::BIPARTITE);
        let names: Vec<String> = b.iter().map(|m| m.to_string()).collect();
        assert_eq!(
            names,
            ["1", "A0", "A1", "B0", "B1", "A0A1", "A1A0", "B0B1", "B1B0", "A0B0", "A0B1", "A1B0", "A1B1"]
        );
    }

    #[test]
    fn tripartite_basis_size_is_stable() {
        let p = build_npa2(&NpaScenario::TRIPARTITE).unwrap();
        assert_eq!(p.size(), 28);
        let q = build_npa2(&NpaScenario::TRIPARTITE).unwrap();
        assert_eq!(p.basis, q.basis);
        assert_eq!(p.moments, q.moments);
    }

    #[test]
    fn matrix_is_symmetric_with_unit_corner() {
        let p = build_npa2(&NpaScenario::TRIPARTITE).unwrap();
        assert_eq!(p.cell(0, 0), Some(0));
        for i in 0..p.size() {
            for j in 0..p.size() {
                assert_eq!(p.cell(i, j), p.cell(j, i));
            }
        }
    }

    #[test]
    fn rejects_other_scenarios() {
        let s = NpaScenario { alice: PartySpec { inputs: 3, outcomes: 2 }, ..NpaScenario::BIPARTITE };
        assert!(build_npa2(&s).is_err());
    }
}
