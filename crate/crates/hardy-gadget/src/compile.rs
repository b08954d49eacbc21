//! Hardy test compiled from the rotated gadget: completed measurement
//! bases, zero constraints, the Born-rule check on the maximally entangled
//! ququart pair and a bounded search over deterministic strategies.

use hardy_core::bell::{Behavior, Scenario};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph::{Vertex, VertexLabel};
use crate::rotate::RotatedGadget;
use crate::scalar::{dot, is_zero_vec, normalize_leading, parallel, scale, sub, vec4, QSqrt3, Vec4};
use crate::{GadgetError, Result};

/// Local dimension of the test.
pub const DIM: usize = 4;

/// How cliques with fewer than four vertices become bases.
pub const COMPLETION_METHOD: &str =
    "exact Gram-Schmidt of e1..e4 against the clique, first nonzero component scaled to 1";

/// One input-output pair per party: `((x, a), (y, b))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HardyPair {
    pub x: usize,
    pub a: usize,
    pub y: usize,
    pub b: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompiledHardyTest {
    /// Gadget rays followed by the completion rays.
    pub rays: Vec<Vertex>,
    /// Measurement bases as ray indices; both parties use the same list and
    /// outcome `a` of input `x` is ray `inputs[x][a]`.
    pub inputs: Vec<[usize; DIM]>,
    /// Inputs that needed completion vectors.
    pub completed_inputs: Vec<usize>,
    pub s_hz: Vec<HardyPair>,
    pub s_exp: Vec<HardyPair>,
    pub x_star: usize,
    pub y_star: usize,
    pub completion_method: String,
}

impl CompiledHardyTest {
    pub fn ray(&self, x: usize, a: usize) -> &Vec4 {
        &self.rays[self.inputs[x][a]].vector
    }

    pub fn scenario(&self) -> Scenario {
        Scenario::new(self.inputs.len(), self.inputs.len(), DIM, DIM)
    }

    fn orthogonality(&self) -> Vec<Vec<bool>> {
        let rs = &self.rays;
        rs.iter().map(|u| rs.iter().map(|v| dot(&u.vector, &v.vector).is_zero()).collect()).collect()
    }
}

/// Extends pairwise orthogonal vectors to an orthogonal basis of `ℚ(√3)⁴`.
pub fn complete_basis(clique: &[Vec4]) -> Result<Vec<Vec4>> {
    let mut basis: Vec<Vec4> = clique.to_vec();
    for k in 0..DIM {
        if basis.len() == DIM {
            break;
        }
        let mut e = vec4([(0, 0); 4]);
        e[k] = QSqrt3::one();
        let mut u = e.clone();
        for q in &basis {
            let c = &dot(&e, q) / &dot(q, q);
            u = sub(&u, &scale(q, &c));
        }
        if !is_zero_vec(&u) {
            basis.push(normalize_leading(&u));
        }
    }
    for (i, u) in basis.iter().enumerate() {
        if is_zero_vec(u) || basis[..i].iter().any(|v| !dot(u, v).is_zero()) {
            return Err(GadgetError::CliqueCompletionFailure(format!("vector {i} of the completed basis")));
        }
    }
    if basis.len() != DIM {
        return Err(GadgetError::CliqueCompletionFailure(format!("only {} independent vectors", basis.len())));
    }
    Ok(basis)
}

/// Turns every maximal clique of the rotated gadget into a measurement basis
/// and collects the zero constraints and the four distinguished pairs.
pub fn compile_hardy_test(rot: &RotatedGadget) -> Result<CompiledHardyTest> {
    let g = &rot.graph;
    let mut rays = g.vertices.clone();
    let star_a: Vec<usize> = g.distinguished.iter().map(|p| p.0).collect();
    let star_b: Vec<usize> = g.distinguished.iter().map(|p| p.1).collect();
    let mut inputs = Vec::new();
    let mut completed_inputs = Vec::new();
    let (mut x_star, mut y_star) = (None, None);
    for (x, clique) in g.cliques.iter().enumerate() {
        let vectors: Vec<Vec4> = clique.iter().map(|&v| rays[v].vector.clone()).collect();
        let full = complete_basis(&vectors)?;
        let mut members = clique.clone();
        for v in &full[clique.len()..] {
            let idx = match rays.iter().position(|r| parallel(&r.vector, v)) {
                Some(i) => i,
                None => {
                    rays.push(Vertex { labels: vec![], vector: v.clone() });
                    rays.len() - 1
                }
            };
            rays[idx].labels.push(VertexLabel::Completion { basis: x });
            members.push(idx);
        }
        if clique.len() < DIM {
            completed_inputs.push(x);
        }
        // The distinguished bases list their outcomes by copy.
        let mut sorted = members.clone();
        sorted.sort_unstable();
        for (star, slot) in [(&star_a, &mut x_star), (&star_b, &mut y_star)] {
            let mut s = star.clone();
            s.sort_unstable();
            if s == sorted {
                members = star.clone();
                *slot = Some(x);
            }
        }
        inputs.push(<[usize; DIM]>::try_from(members).expect("four members"));
    }
    let (Some(x_star), Some(y_star)) = (x_star, y_star) else {
        return Err(GadgetError::OrthogonalityFailure("distinguished vertices do not form maximal cliques".into()));
    };
    let mut test = CompiledHardyTest {
        rays,
        inputs,
        completed_inputs,
        s_hz: Vec::new(),
        s_exp: (0..DIM).map(|k| HardyPair { x: x_star, a: k, y: y_star, b: k }).collect(),
        x_star,
        y_star,
        completion_method: COMPLETION_METHOD.to_string(),
    };
    let orth = test.orthogonality();
    let n = test.inputs.len();
    for x in 0..n {
        for y in 0..n {
            for a in 0..DIM {
                for b in 0..DIM {
                    if orth[test.inputs[x][a]][test.inputs[y][b]] {
                        test.s_hz.push(HardyPair { x, a, y, b });
                    }
                }
            }
        }
    }
    Ok(test)
}

/// Exact `P(a,b|x,y) = |<v_(x,a)|v_(y,b)>|² / d` for normalized real
/// vectors on `(1/√d) Σ|ii>`, indexed `[x][y][a][b]`.
pub fn quantum_table(test: &CompiledHardyTest) -> Vec<Vec<[[QSqrt3; DIM]; DIM]>> {
    let inv_norm: Vec<QSqrt3> =
        test.rays.iter().map(|r| dot(&r.vector, &r.vector).inv().expect("rays are nonzero")).collect();
    let d = QSqrt3::int(DIM as i64, 0).inv().expect("nonzero");
    let n = test.inputs.len();
    (0..n)
        .into_par_iter()
        .map(|x| {
            (0..n)
                .map(|y| {
                    std::array::from_fn(|a| {
                        std::array::from_fn(|b| {
                            let (r, s) = (test.inputs[x][a], test.inputs[y][b]);
                            let ip = dot(&test.rays[r].vector, &test.rays[s].vector);
                            &(&(&ip * &ip) * &(&inv_norm[r] * &inv_norm[s])) * &d
                        })
                    })
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumReport {
    pub inputs: usize,
    pub zero_constraints: usize,
    pub zeros_hold: bool,
    /// Every `(x, y)` block sums to exactly 1.
    pub normalized: bool,
    /// Every marginal of every input is exactly `1/d`.
    pub marginals_uniform: bool,
    pub s_exp_values: Vec<QSqrt3>,
    pub hardy_probability: QSqrt3,
    /// `P(a,b|x*,y*)`, outcomes ordered by copy.
    pub star_table: Vec<Vec<QSqrt3>>,
    pub star_uniform: bool,
    pub h_global: f64,
    pub h_local: f64,
}

impl QuantumReport {
    /// All exact checks of the quantum strategy passed.
    pub fn passed(&self) -> bool {
        self.zeros_hold && self.normalized && self.marginals_uniform && self.star_uniform
    }
}

pub fn quantum_verify(test: &CompiledHardyTest) -> Result<QuantumReport> {
    let table = quantum_table(test);
    let n = test.inputs.len();
    let one = QSqrt3::one();
    let inv_d = QSqrt3::int(DIM as i64, 0).inv().expect("nonzero");
    let zeros_hold = test.s_hz.iter().all(|p| table[p.x][p.y][p.a][p.b].is_zero());
    let mut normalized = true;
    let mut marginals_uniform = true;
    for x in 0..n {
        for y in 0..n {
            let block = &table[x][y];
            let mut total = QSqrt3::zero();
            for a in 0..DIM {
                let mut ma = QSqrt3::zero();
                let mut mb = QSqrt3::zero();
                for b in 0..DIM {
                    ma = &ma + &block[a][b];
                    mb = &mb + &block[b][a];
                }
                marginals_uniform &= ma == inv_d && mb == inv_d;
                total = &total + &ma;
            }
            normalized &= total == one;
        }
    }
    let s_exp_values: Vec<QSqrt3> = test.s_exp.iter().map(|p| table[p.x][p.y][p.a][p.b].clone()).collect();
    let hardy_probability = s_exp_values.iter().fold(QSqrt3::zero(), |s, v| &s + v);
    let star = &table[test.x_star][test.y_star];
    let star_table: Vec<Vec<QSqrt3>> = star.iter().map(|row| row.to_vec()).collect();
    let target = &inv_d * &inv_d;
    let star_uniform = star_table.iter().flatten().all(|p| *p == target);
    let max_of = |vals: Vec<QSqrt3>| {
        vals.into_iter().reduce(|m, v| if (&v - &m).signum() > 0 { v } else { m }).expect("nonempty")
    };
    let p_max = max_of(star_table.iter().flatten().cloned().collect());
    let marg_max = max_of(star.iter().map(|row| row.iter().fold(QSqrt3::zero(), |s, v| &s + v)).collect());
    Ok(QuantumReport {
        inputs: n,
        zero_constraints: test.s_hz.len(),
        zeros_hold,
        normalized,
        marginals_uniform,
        s_exp_values,
        hardy_probability,
        star_table,
        star_uniform,
        h_global: -p_max.to_f64().log2(),
        h_local: -marg_max.to_f64().log2(),
    })
}

/// The quantum strategy as a floating-point behavior.
pub fn quantum_behavior(test: &CompiledHardyTest) -> Result<Behavior> {
    let table = quantum_table(test);
    Ok(Behavior::from_fn(test.scenario(), |a, b, x, y| table[x][y][a][b].to_f64())?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LhvReport {
    /// Deterministic strategies meeting every zero constraint.
    pub strategies: u64,
    pub nodes: u64,
    /// Largest number of `S_exp` pairs one such strategy fires.
    pub max_hardy_hits: usize,
}

/// Enumerates deterministic strategies that satisfy all zero constraints,
/// up to `node_cap` search nodes.
///
/// With `x = y`, Bob's outcome must be non-orthogonal to Alice's, and the
/// only such vector in a basis is Alice's own; so both parties answer with
/// the same ray per basis and the chosen rays must be pairwise
/// non-orthogonal. The search runs over such ray selections.
pub fn lhv_search(test: &CompiledHardyTest, node_cap: u64) -> Result<LhvReport> {
    struct Search<'a> {
        test: &'a CompiledHardyTest,
        orth: Vec<Vec<bool>>,
        cap: u64,
        report: LhvReport,
    }
    impl Search<'_> {
        fn go(&mut self, chosen: &mut Vec<Option<usize>>) -> Result<()> {
            self.report.nodes += 1;
            if self.report.nodes > self.cap {
                return Err(GadgetError::CapExceeded(self.cap));
            }
            let picked: Vec<usize> = chosen.iter().flatten().copied().collect();
            // Most constrained open basis first.
            let mut best: Option<(usize, Vec<usize>)> = None;
            for (x, basis) in self.test.inputs.iter().enumerate() {
                if chosen[x].is_some() {
                    continue;
                }
                let opts: Vec<usize> =
                    (0..DIM).filter(|&a| picked.iter().all(|&r| !self.orth[basis[a]][r])).collect();
                if best.as_ref().is_none_or(|b| opts.len() < b.1.len()) {
                    let empty = opts.is_empty();
                    best = Some((x, opts));
                    if empty {
                        return Ok(());
                    }
                }
            }
            let Some((x, opts)) = best else {
                self.report.strategies += 1;
                let t = self.test;
                let hits = t.s_exp.iter().filter(|p| chosen[p.x] == Some(t.inputs[p.x][p.a]) && chosen[p.y] == Some(t.inputs[p.y][p.b])).count();
                self.report.max_hardy_hits = self.report.max_hardy_hits.max(hits);
                return Ok(());
            };
            for a in opts {
                let ray = self.test.inputs[x][a];
                // A ray chosen in one basis is forced in every basis holding it.
                let forced: Vec<usize> = (0..chosen.len())
                    .filter(|&z| chosen[z].is_none() && self.test.inputs[z].contains(&ray))
                    .collect();
                for &z in &forced {
                    chosen[z] = Some(ray);
                }
                self.go(chosen)?;
                for &z in &forced {
                    chosen[z] = None;
                }
            }
            Ok(())
        }
    }
    let mut s = Search {
        test,
        orth: test.orthogonality(),
        cap: node_cap,
        report: LhvReport { strategies: 0, nodes: 0, max_hardy_hits: 0 },
    };
    s.go(&mut vec![None; test.inputs.len()])?;
    Ok(s.report)
}
