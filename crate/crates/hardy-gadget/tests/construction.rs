use hardy_gadget::compile::{complete_basis, DIM};
use hardy_gadget::graph::{gadget15_vectors, VertexLabel};
use hardy_gadget::scalar::{dot, QSqrt3};
use hardy_gadget::{
    build_gadget15, compile_hardy_test, lhv_search, quantum_behavior, quantum_verify, rotate_copies,
    verify_gadget_coloring, CompiledHardyTest,
};

fn floats(v: &[QSqrt3; 4]) -> [f64; 4] {
    std::array::from_fn(|i| v[i].to_f64())
}

fn compiled() -> CompiledHardyTest {
    compile_hardy_test(&rotate_copies(&build_gadget15().unwrap()).unwrap()).unwrap()
}

/// Edges from floating-point inner products, then maximal cliques and
/// valid colorings by plain subset enumeration.
#[test]
fn coloring_count_matches_subset_oracle() {
    let vs: Vec<[f64; 4]> = gadget15_vectors().iter().map(floats).collect();
    let n = vs.len();
    let adj = |i: usize, j: usize| i != j && vs[i].iter().zip(&vs[j]).map(|(a, b)| a * b).sum::<f64>().abs() < 1e-9;
    let is_clique = |m: u32| (0..n).all(|i| (0..n).all(|j| m >> i & 1 == 0 || m >> j & 1 == 0 || i == j || adj(i, j)));
    let cliques: Vec<u32> = (1u32..1 << n)
        .filter(|&m| m.count_ones() >= 2 && is_clique(m))
        .filter(|&m| (0..n).all(|v| m >> v & 1 == 1 || !is_clique(m | 1 << v)))
        .collect();
    let mut valid = 0;
    let mut both = 0;
    for m in 0u32..1 << n {
        let independent = (0..n).all(|i| (0..n).all(|j| !(m >> i & 1 == 1 && m >> j & 1 == 1 && adj(i, j))));
        if independent && cliques.iter().all(|c| (m & c).count_ones() == 1) {
            valid += 1;
            both += (m & 1 != 0 && m >> 13 & 1 != 0) as u64;
        }
    }
    let g = build_gadget15().unwrap();
    let r = verify_gadget_coloring(&g).unwrap();
    assert_eq!(g.cliques.len(), cliques.len());
    assert_eq!(r.valid_colorings, valid);
    assert_eq!(r.distinguished_both_one, vec![both]);
    assert_eq!(both, 0);
    assert!(r.certified && !r.degenerate_cliques);
    assert_eq!(r.assignments, 1 << 15);
}

#[test]
fn every_copy_is_a_certified_gadget() {
    let rot = rotate_copies(&build_gadget15().unwrap()).unwrap();
    for k in 1..=4 {
        let labels: Vec<usize> = (1..=15).map(|i| rot.vertex(k, i)).collect();
        for i in 0..15 {
            for j in 0..15 {
                let exact = dot(&rot.graph.vertices[labels[i]].vector, &rot.graph.vertices[labels[j]].vector);
                let original = dot(&gadget15_vectors()[i], &gadget15_vectors()[j]);
                assert_eq!(exact.is_zero(), original.is_zero());
            }
        }
        let (u, v) = rot.graph.distinguished[k - 1];
        assert_eq!((u, v), (rot.vertex(k, 1), rot.vertex(k, 14)));
    }
    for i in 1..=15 {
        for k in 1..=4 {
            for l in k + 1..=4 {
                let (a, b) = (&rot.copies[k - 1][i - 1], &rot.copies[l - 1][i - 1]);
                assert!(dot(a, b).is_zero(), "v{i} copies {k},{l}");
            }
        }
    }
}

#[test]
fn compiled_test_structure() {
    let t = compiled();
    assert_eq!(t.inputs.len(), 58);
    assert_eq!(t.completed_inputs.len(), 20);
    assert_eq!(t.rays.len(), 68);
    assert_eq!(t.s_exp.len(), 4);
    for basis in &t.inputs {
        for a in 0..DIM {
            for b in 0..DIM {
                let ip = dot(&t.rays[basis[a]].vector, &t.rays[basis[b]].vector);
                assert_eq!(ip.is_zero(), a != b);
            }
        }
    }
    for p in &t.s_hz {
        assert!(dot(t.ray(p.x, p.a), t.ray(p.y, p.b)).is_zero());
    }
    for k in 0..DIM {
        assert!(t.rays[t.inputs[t.x_star][k]].labels.contains(&VertexLabel::Gadget { copy: k + 1, index: 1 }));
        assert!(t.rays[t.inputs[t.y_star][k]].labels.contains(&VertexLabel::Gadget { copy: k + 1, index: 14 }));
    }
    // Canonical completion makes compilation reproducible.
    assert_eq!(compiled(), t);
}

#[test]
fn completion_of_a_single_vector() {
    let v = hardy_gadget::scalar::vec4([(1, 1), (1, 0), (0, 0), (0, 0)]);
    let basis = complete_basis(&[v]).unwrap();
    assert_eq!(basis.len(), 4);
    assert!(basis[1..].iter().all(|u| u.iter().find(|c| !c.is_zero()) == Some(&QSqrt3::one())));
}

#[test]
fn quantum_strategy_is_exactly_uniform_at_the_distinguished_inputs() {
    let t = compiled();
    let r = quantum_verify(&t).unwrap();
    assert!(r.passed());
    let sixteenth = &QSqrt3::one() / &QSqrt3::int(16, 0);
    assert!(r.star_table.iter().flatten().all(|p| *p == sixteenth));
    assert!(r.s_exp_values.iter().all(|p| *p == sixteenth));
    assert_eq!(r.hardy_probability, &QSqrt3::one() / &QSqrt3::int(4, 0));
    assert_eq!((r.h_global, r.h_local), (4.0, 2.0));
}

/// `|<ψ|u⊗v>|²` with `ψ = Σ|ii>/2`, built as an explicit 16-vector.
#[test]
fn behavior_matches_tensor_born_rule() {
    let t = compiled();
    let beh = quantum_behavior(&t).unwrap();
    let unit = |v: &[QSqrt3; 4]| {
        let f = floats(v);
        let n = f.iter().map(|c| c * c).sum::<f64>().sqrt();
        f.map(|c| c / n)
    };
    let psi: Vec<f64> = (0..16).map(|k| if k / 4 == k % 4 { 0.5 } else { 0.0 }).collect();
    let n = t.inputs.len();
    let mut worst = 0.0f64;
    for x in (0..n).step_by(3) {
        for y in (0..n).step_by(5) {
            for a in 0..DIM {
                for b in 0..DIM {
                    let (u, v) = (unit(t.ray(x, a)), unit(t.ray(y, b)));
                    let amp: f64 = (0..16).map(|k| psi[k] * u[k / 4] * v[k % 4]).sum();
                    worst = worst.max((amp * amp - beh.p(a, b, x, y)).abs());
                }
            }
        }
    }
    assert!(worst < 1e-14, "{worst}");
}

#[test]
fn no_deterministic_strategy_fires_a_distinguished_pair() {
    let r = lhv_search(&compiled(), 1_000_000).unwrap();
    assert!(r.strategies > 0);
    assert_eq!(r.max_hardy_hits, 0);
    assert!(lhv_search(&compiled(), 10).is_err());
}

#[test]
fn compiled_test_round_trips_through_json() {
    let t = compiled();
    let text = serde_json::to_string(&t).unwrap();
    assert!(text.contains("√3"));
    let back: CompiledHardyTest = serde_json::from_str(&text).unwrap();
    assert_eq!(back, t);
}
