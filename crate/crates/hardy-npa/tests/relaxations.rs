use std::collections::BTreeSet;

use hardy_core::bell::{hardy_bell_functional, iw_functional};
use hardy_core::iw::{iw_classical, iw_explicit_behavior, iw_quantum_numeric};
use hardy_core::nosignaling::{tilde_mdl_functional, SeedBounds};
use hardy_core::tilted::{behavior_of, canonical_strategy, TiltParameter};
use hardy_npa::monomial::{Party, Symbol};
use hardy_npa::problem::{build_npa2, level2_basis, NpaScenario};
use hardy_npa::programs::{functional_problem, guess_problem, max_functional_q2, ValueConstraint};
use hardy_npa::sdpa::{export_sdpa, SdpaProblem};
use hardy_npa::{guess_prob_vs_iw, ClarabelSolver, NpaError, SdpSolver};

const TSIRELSON: f64 = 2.0 * std::f64::consts::SQRT_2;

/// Counts distinct operators among words of length at most two using only
/// string rewriting: equal letters merge, letters of different parties
/// commute, distinct outcomes of one measurement annihilate.
fn brute_force_count(letters: &[(char, u8, u8)]) -> usize {
    let mut seen = BTreeSet::new();
    seen.insert(String::new());
    for &l in letters {
        seen.insert(format!("{}{}{}", l.0, l.1, l.2));
    }
    for &s in letters {
        for &t in letters {
            let word = if s == t {
                vec![s]
            } else if s.0 == t.0 && s.1 == t.1 {
                continue;
            } else if s.0 != t.0 && s.0 > t.0 {
                vec![t, s]
            } else {
                vec![s, t]
            };
            seen.insert(word.iter().map(|l| format!("{}{}{}", l.0, l.1, l.2)).collect::<String>());
        }
    }
    seen.len()
}

#[test]
fn basis_sizes_match_brute_force() {
    let ab = [('A', 0, 0), ('A', 1, 0), ('B', 0, 0), ('B', 1, 0)];
    assert_eq!(level2_basis(&NpaScenario::BIPARTITE).len(), brute_force_count(&ab));
    let abe = [ab.as_slice(), &[('E', 0, 0), ('E', 0, 1), ('E', 0, 2)]].concat();
    assert_eq!(level2_basis(&NpaScenario::TRIPARTITE).len(), brute_force_count(&abe));
    assert_eq!(brute_force_count(&abe), 28);
}

#[test]
fn every_probability_is_a_moment() {
    let p = build_npa2(&NpaScenario::TRIPARTITE).unwrap();
    for x in 0..2 {
        for y in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    assert!(p.expr(&p.prob_poly(a, b, x, y)).is_ok());
                    for e in 0..4 {
                        assert!(p.expr(&p.prob_poly_eve(a, b, e, x, y).unwrap()).is_ok());
                    }
                }
            }
        }
    }
    let e0 = Symbol::new(Party::E, 0, 0);
    assert!(p.moment_index(&hardy_npa::monomial::Monomial::canonical(&[e0]).unwrap()).is_some());
}

#[test]
fn chsh_bound_and_extracted_behavior() {
    let s = ClarabelSolver::default();
    let p = functional_problem(&iw_functional(0.0)).unwrap();
    let r = s.solve(&p).unwrap().checked().unwrap();
    assert!((r.value - TSIRELSON).abs() < 1e-6, "{}", r.value);
    let beh = p.behavior(&r.moments).unwrap();
    assert!(beh.signalling() < 1e-6);
    assert!((iw_functional(0.0).eval(&beh).unwrap() - TSIRELSON).abs() < 1e-5);
}

#[test]
fn upper_bounds_dominate_explicit_strategies() {
    let s = ClarabelSolver::default();
    for w in [-0.2, 0.1, 0.44, 0.8] {
        let (lambda, beh) = iw_explicit_behavior(w).unwrap();
        let f = iw_functional(w);
        let bound = max_functional_q2(&f, &s).unwrap().value;
        assert!(bound >= f.eval(&beh).unwrap() - 1e-6, "w={w}");
        if w < 0.7 {
            assert!(bound <= lambda + 1e-5, "w={w}: {bound} vs {lambda}");
        }
        let hardy = hardy_bell_functional(w);
        let tilted = behavior_of(&canonical_strategy(TiltParameter::new(w).unwrap()));
        assert!(max_functional_q2(&hardy, &s).unwrap().value >= hardy.eval(&tilted).unwrap() - 1e-6);
    }
}

#[test]
fn level_two_is_loose_for_large_tilt() {
    // Qubit strategies suffice for two binary measurements per party, so
    // the qubit optimum is the quantum value; level 2 overshoots it here.
    let q2 = max_functional_q2(&iw_functional(0.8), &ClarabelSolver::default()).unwrap().value;
    let quantum = iw_quantum_numeric(0.8).unwrap().lambda_max;
    assert!(q2 - quantum > 1e-4 && q2 - quantum < 1e-3, "{q2} vs {quantum}");
}

#[test]
fn iw_at_044_matches_numeric_route() {
    let q2 = max_functional_q2(&iw_functional(0.44), &ClarabelSolver::default()).unwrap().value;
    let numeric = iw_quantum_numeric(0.44).unwrap().lambda_max;
    assert!((q2 - numeric).abs() < 1e-5, "{q2} vs {numeric}");
}

#[test]
fn uniform_seed_scales_the_hardy_bound() {
    let s = ClarabelSolver::default();
    let w = 0.3;
    let tilde = max_functional_q2(&tilde_mdl_functional(w, &SeedBounds::uniform()), &s).unwrap().value;
    let hardy = max_functional_q2(&hardy_bell_functional(w), &s).unwrap().value;
    assert!((tilde - hardy / 16.0).abs() < 1e-7, "{tilde} vs {}", hardy / 16.0);
}

#[test]
fn guessing_at_the_quantum_maximum() {
    let s = ClarabelSolver::default();
    let numeric = iw_quantum_numeric(0.44).unwrap().lambda_max;
    let tilted = guess_prob_vs_iw(0.44, numeric, (1, 1), &s).unwrap();
    assert!((tilted.min_entropy - 1.5860).abs() < 0.01, "{}", tilted.min_entropy);
    let chsh = guess_prob_vs_iw(0.0, TSIRELSON, (1, 1), &s).unwrap();
    assert!((chsh.min_entropy - 1.23).abs() < 0.02, "{}", chsh.min_entropy);
}

#[test]
fn local_value_certifies_nothing() {
    let s = ClarabelSolver::default();
    for w in [-0.1, 0.0, 0.44] {
        let g = guess_prob_vs_iw(w, iw_classical(w), (1, 1), &s).unwrap();
        assert!((g.guess - 1.0).abs() < 1e-6 && g.min_entropy < 1e-6, "w={w}");
    }
}

#[test]
fn guess_is_monotone_in_violation() {
    let s = ClarabelSolver::default();
    let w = 0.44;
    let (lo, hi) = (iw_classical(w), iw_quantum_numeric(w).unwrap().lambda_max);
    let mut last = f64::INFINITY;
    for k in 0..=6 {
        let v = lo + (hi - lo) * k as f64 / 6.0;
        let g = guess_prob_vs_iw(w, v, (1, 1), &s).unwrap().guess;
        assert!(g <= last + 1e-6, "v={v}: {g} > {last}");
        last = g;
    }
}

#[test]
fn values_beyond_the_relaxation_are_infeasible() {
    let err = guess_prob_vs_iw(0.0, TSIRELSON + 0.05, (1, 1), &ClarabelSolver::default()).unwrap_err();
    assert_eq!(err, NpaError::Infeasible);
}

#[test]
fn sdpa_round_trip_and_file_route() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chsh.dat-s");
    let p = functional_problem(&iw_functional(0.0)).unwrap();
    let written = export_sdpa(&p, &path).unwrap();
    let read = SdpaProblem::read(&path).unwrap();
    assert_eq!(written, read);
    assert_eq!(read.to_sdpa_string(), std::fs::read_to_string(&path).unwrap());
    let (v, _) = read.solve(&ClarabelSolver::default()).unwrap();
    assert!((v - TSIRELSON).abs() < 1e-6, "{v}");

    let g = guess_problem(0.44, 3.4, (1, 1), ValueConstraint::Equal).unwrap();
    let text = SdpaProblem::from_problem(&g).to_sdpa_string();
    assert_eq!(SdpaProblem::parse(&text).unwrap(), SdpaProblem::from_problem(&g));
    let direct = ClarabelSolver::default().solve(&g).unwrap().value;
    let (via_file, _) = SdpaProblem::parse(&text).unwrap().solve(&ClarabelSolver::default()).unwrap();
    assert!((direct - via_file).abs() < 1e-6, "{direct} vs {via_file}");
}

#[test]
fn feasibility_problem_has_zero_objective() {
    let p = build_npa2(&NpaScenario::BIPARTITE).unwrap();
    let sdpa = SdpaProblem::from_problem(&p);
    assert!(sdpa.c.iter().all(|&c| c == 0.0));
    assert_eq!(sdpa.block_sizes, vec![13]);
}
