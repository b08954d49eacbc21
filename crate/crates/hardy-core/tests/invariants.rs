use hardy_core::bell::{
    constrained_classical_bound, enumerate_deterministic, hardy_bell_functional, iw_functional, tilted_hardy_functional,
    Behavior, Scenario, HARDY_ZEROS,
};
use hardy_core::ladder::{ladder_prob, LadderParams};
use hardy_core::nosignaling::{all_targets, ns_entry_bounds, ns_hardy_range, ns_lp_min_prob};
use hardy_core::tilted::{behavior_of, canonical_strategy, hardy_value, optimal_theta, quantum_max, TiltParameter};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn w_grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| -0.2499 + (0.9999 + 0.2499) * (i as f64 + 0.5) / n as f64)
}

fn random_local(rng: &mut ChaCha8Rng) -> Behavior {
    let s = Scenario::CHSH;
    let boxes = enumerate_deterministic(s).unwrap();
    let weights: Vec<f64> = boxes.iter().map(|_| rng.gen::<f64>()).collect();
    let total: f64 = weights.iter().sum();
    let mut t = vec![0.0; s.len()];
    for (d, wt) in boxes.iter().zip(&weights) {
        for (ti, bi) in t.iter_mut().zip(d.behavior(s).table()) {
            *ti += wt / total * bi;
        }
    }
    Behavior::new(s, t).unwrap()
}

fn pr_box() -> Behavior {
    Behavior::from_fn(Scenario::CHSH, |a, b, x, y| if (a ^ b) == (x & y) { 0.5 } else { 0.0 }).unwrap()
}

#[test]
fn canonical_strategy_is_consistent_on_a_dense_grid() {
    for w in w_grid(200) {
        let tw = TiltParameter::new(w).unwrap();
        let p = behavior_of(&canonical_strategy(tw));
        for &(a, b, x, y) in &HARDY_ZEROS {
            assert!(p.p(a, b, x, y).abs() < 1e-12, "w={w}");
        }
        let v = tilted_hardy_functional(w).eval(&p).unwrap();
        assert!((v - quantum_max(tw)).abs() < 1e-10, "w={w}");
        assert!((hardy_value(w, optimal_theta(tw)) - quantum_max(tw)).abs() < 1e-10);
        let classical = constrained_classical_bound(&tilted_hardy_functional(w), &HARDY_ZEROS).unwrap();
        assert!(quantum_max(tw) > classical, "w={w}");
        assert!(p.signalling() < 1e-12);
    }
}

#[test]
fn iw_identity_on_random_behaviors() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let quantum: Vec<Behavior> = w_grid(5).map(|w| behavior_of(&canonical_strategy(TiltParameter::new(w).unwrap()))).collect();
    for k in 0..200 {
        let w = rng.gen_range(-0.24..0.99);
        let base = random_local(&mut rng);
        let p = match k % 3 {
            0 => base,
            1 => base.mix(&pr_box(), rng.gen()).unwrap(),
            _ => base.mix(&quantum[k % quantum.len()], rng.gen()).unwrap(),
        };
        let lhs = iw_functional(w).eval(&p).unwrap();
        let rhs = 4.0 * hardy_bell_functional(w).eval(&p).unwrap() - (w - 2.0) + 4.0 * w.max(0.0);
        assert!((lhs - rhs).abs() < 1e-12, "w={w}: {lhs} vs {rhs}");
    }
}

#[test]
fn ladder_matches_born_rule() {
    for (n, t) in [(1, 0.46), (2, 0.3), (5, 0.77), (12, 0.9)] {
        let params = LadderParams::new(n, t).unwrap();
        let norm = (1.0 + t * t).sqrt();
        let (alpha, beta) = (t / norm, 1.0 / norm);
        let basis = |k: usize, o: usize| {
            let g = ((-t).powi(k as i32) * t.sqrt()).atan();
            if o == 0 {
                [g.cos(), g.sin()]
            } else {
                [-g.sin(), g.cos()]
            }
        };
        for x in 0..=n {
            for y in 0..=n {
                for a in 0..2 {
                    for b in 0..2 {
                        let (u, v) = (basis(x, a), basis(y, b));
                        let amp = alpha * u[0] * v[0] - beta * u[1] * v[1];
                        let got = ladder_prob(&params, a, b, x, y);
                        assert!((amp * amp - got).abs() < 1e-12, "n={n} t={t} ({a},{b}|{x},{y})");
                    }
                }
            }
        }
    }
}

#[test]
fn ns_lower_bounds_hold_for_nonpositive_w() {
    for w in [-0.24, -0.15, -0.05, 0.0] {
        let (_, hi) = ns_hardy_range(w).unwrap();
        for j in 0..8 {
            let v = hi * j as f64 / 7.0;
            for t @ (a, b, x, y) in all_targets() {
                let (lower, _) = ns_entry_bounds(w, v, a, b, x, y).unwrap();
                let m = ns_lp_min_prob(w, v, t).unwrap();
                assert!(m >= lower - 1e-9, "w={w} v={v} t={t:?}: {m} < {lower}");
            }
        }
    }
}

proptest! {
    #[test]
    fn functionals_are_affine(w in -0.24f64..0.99, alpha in 0.0f64..1.0, seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_local(&mut rng);
        let q = pr_box();
        let mixed = p.mix(&q, alpha).unwrap();
        for f in [iw_functional(w), hardy_bell_functional(w)] {
            let lhs = f.eval(&mixed).unwrap();
            let rhs = alpha * f.eval(&p).unwrap() + (1.0 - alpha) * f.eval(&q).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn swapping_parties_preserves_iw(w in -0.24f64..0.99, seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_local(&mut rng);
        let swapped = Behavior::from_fn(Scenario::CHSH, |a, b, x, y| p.p(b, a, y, x)).unwrap();
        let f = iw_functional(w);
        prop_assert!((f.eval(&p).unwrap() - f.eval(&swapped).unwrap()).abs() < 1e-12);
    }
}
