//! Words of projectors and polynomials over them.
//!
//! Projectors of different parties commute; projectors of one party obey
//! `P² = P` and `P_a P_b = 0` for distinct outcomes of the same input.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
    E,
}

/// Projector onto `outcome` of measurement `input` held by `party`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Symbol {
    pub party: Party,
    pub input: u8,
    pub outcome: u8,
}

impl Symbol {
    pub const fn new(party: Party, input: u8, outcome: u8) -> Self {
        Symbol { party, input, outcome }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = match self.party {
            Party::A => "A",
            Party::B => "B",
            Party::E => "E",
        };
        // Binary measurements only carry the outcome-0 projector, so the
        // input alone names them. Eve has one input.
        match self.party {
            Party::E => write!(f, "{p}{}", self.outcome),
            _ if self.outcome == 0 => write!(f, "{p}{}", self.input),
            _ => write!(f, "{p}{}_{}", self.input, self.outcome),
        }
    }
}

/// A canonical word of projectors. The empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
pub struct Monomial(Vec<Symbol>);

impl Monomial {
    pub fn identity() -> Self {
        Monomial(Vec::new())
    }

    /// Canonical form of a raw word, or `None` if the word vanishes.
    pub fn canonical(word: &[Symbol]) -> Option<Self> {
        let mut sorted = word.to_vec();
        sorted.sort_by_key(|s| s.party);
        let mut out: Vec<Symbol> = Vec::with_capacity(sorted.len());
        for s in sorted {
            match out.last() {
                Some(t) if t.party == s.party && t.input == s.input => {
                    if t.outcome != s.outcome {
                        return None;
                    }
                }
                _ => out.push(s),
            }
        }
        Some(Monomial(out))
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    /// Canonical form of the adjoint word.
    pub fn adjoint(&self) -> Self {
        let mut w = self.0.clone();
        w.reverse();
        Monomial::canonical(&w).expect("the adjoint of a non-zero word is non-zero")
    }

    /// Product `self * other`, or `None` if it vanishes.
    pub fn mul(&self, other: &Monomial) -> Option<Monomial> {
        let mut w = self.0.clone();
        w.extend_from_slice(&other.0);
        Monomial::canonical(&w)
    }

    /// Representative shared by a word and its adjoint. Moments of a real
    /// relaxation agree on both.
    pub fn moment_key(&self) -> Monomial {
        let adj = self.adjoint();
        if adj < *self {
            adj
        } else {
            self.clone()
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for s in &self.0 {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Real linear combination of canonical words.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly(BTreeMap<Monomial, f64>);

impl Poly {
    pub fn zero() -> Self {
        Poly(BTreeMap::new())
    }

    pub fn constant(c: f64) -> Self {
        Poly::zero().plus_term(Monomial::identity(), c)
    }

    pub fn symbol(s: Symbol) -> Self {
        Poly::zero().plus_term(Monomial(vec![s]), 1.0)
    }

    pub fn plus_term(mut self, m: Monomial, c: f64) -> Self {
        *self.0.entry(m).or_insert(0.0) += c;
        self
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.0 {
            out = out.plus_term(m.clone(), *c);
        }
        out
    }

    pub fn scale(&self, k: f64) -> Poly {
        Poly(self.0.iter().map(|(m, c)| (m.clone(), c * k)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.0 {
            for (m2, c2) in &other.0 {
                if let Some(m) = m1.mul(m2) {
                    out = out.plus_term(m, c1 * c2);
                }
            }
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.0.iter().filter(|(_, c)| **c != 0.0).map(|(m, c)| (m, *c))
    }
}

/// Projector for an outcome of a measurement with `outcomes` results, where
/// only the first `outcomes - 1` projectors are independent.
pub fn projector(party: Party, input: u8, outcome: u8, outcomes: u8) -> Poly {
    if outcome + 1 < outcomes {
        return Poly::symbol(Symbol::new(party, input, outcome));
    }
    (0..outcomes - 1).fold(Poly::constant(1.0), |p, o| p.add(&Poly::symbol(Symbol::new(party, input, o)).scale(-1.0)))
}
