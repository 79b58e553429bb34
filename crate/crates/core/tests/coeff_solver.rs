use dyadic_core::rational::rat;
use dyadic_core::solver::{max_level, solve_exact, solve_level, LinearSolution, SolutionKind};
use dyadic_core::stencil::{mean_value_level, MeanValueLevel, StencilFamily, StencilPair};
use dyadic_core::verify::published_stencils;
use dyadic_core::{Error, Rational};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pairs(list: &[(u32, u32)]) -> Vec<StencilPair> {
    list.iter().map(|&(a, b)| StencilPair::new(a, b)).collect()
}

#[test]
fn published_systems_round_trip() {
    for (n, s) in published_stencils().iter().enumerate() {
        let level = n as u32 + 1;
        let set = solve_level(s.pairs(), level).unwrap();
        assert_eq!(set.kind, SolutionKind::Unique);
        let a = set.particular.clone().unwrap();
        assert_eq!(a, s.coefficients());
        let realized = mean_value_level(s.pairs(), &a, level + 2);
        assert!(realized.lower_bound() >= level);
        assert_eq!(set.realized_level, Some(MeanValueLevel::Exact(level)));
    }
}

#[test]
fn level_one_family() {
    let set = solve_level(&pairs(&[(0, 1), (1, 1)]), 1).unwrap();
    assert_eq!(set.kind, SolutionKind::AffineFamily);
    assert_eq!(set.null_basis.len(), 1);
    assert_eq!(set.min_norm_member().unwrap(), vec![rat(1, 8), rat(1, 8)]);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5 {
        let t = rat(rng.gen_range(-50..50), rng.gen_range(1..20));
        let a = set.member(&[t]).unwrap();
        assert_eq!(&a[0] + &a[1], rat(1, 4));
        // Every member is normalized, so construction (which checks it) succeeds.
        let fam = StencilFamily::new(set.pairs.clone(), a);
        if let Ok(f) = fam {
            assert!(f.level().lower_bound() >= 1);
        }
    }
}

#[test]
fn infeasible_and_max_levels() {
    let set = solve_level(&pairs(&[(0, 1)]), 2).unwrap();
    assert_eq!(set.kind, SolutionKind::Infeasible);
    assert!(set.particular.is_none());
    assert_eq!(max_level(&pairs(&[(0, 1)]), 6).unwrap(), 1);
    assert_eq!(max_level(&pairs(&[(0, 1), (1, 1)]), 6).unwrap(), 2);
    assert_eq!(max_level(&pairs(&[(0, 1), (1, 1), (0, 2), (1, 2)]), 6).unwrap(), 4);
}

#[test]
fn malformed_input() {
    assert!(matches!(
        solve_level(&pairs(&[(0, 1), (1, 0)]), 1),
        Err(Error::DuplicatePair { .. })
    ));
    assert!(solve_level(&[], 1).is_err());
    assert!(solve_level(&pairs(&[(0, 1)]), 0).is_err());
}

#[test]
fn random_exact_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..40 {
        let rows = rng.gen_range(1..5);
        let cols = rng.gen_range(1..5);
        let m: Vec<Vec<Rational>> = (0..rows)
            .map(|_| (0..cols).map(|_| rat(rng.gen_range(-4..5), rng.gen_range(1..4))).collect())
            .collect();
        let x: Vec<Rational> = (0..cols).map(|_| rat(rng.gen_range(-9..10), rng.gen_range(1..5))).collect();
        let b: Vec<Rational> = m
            .iter()
            .map(|r| r.iter().zip(&x).fold(Rational::zero(), |a, (u, v)| a + u * v))
            .collect();
        match solve_exact(&m, &b) {
            LinearSolution::Solved { particular, null_basis } => {
                let apply = |v: &[Rational]| -> Vec<Rational> {
                    m.iter()
                        .map(|r| r.iter().zip(v).fold(Rational::zero(), |a, (u, w)| a + u * w))
                        .collect()
                };
                assert_eq!(apply(&particular), b, "trial {trial}");
                for v in &null_basis {
                    assert!(apply(v).iter().all(Zero::is_zero), "trial {trial}");
                }
            }
            LinearSolution::Inconsistent => panic!("consistent system reported inconsistent (trial {trial})"),
        }
    }
}

#[test]
fn solution_json() {
    let set = solve_level(&pairs(&[(0, 1), (1, 1)]), 2).unwrap();
    let v: serde_json::Value = serde_json::from_str(&set.to_json().unwrap()).unwrap();
    assert_eq!(v["kind"], "unique");
    assert_eq!(v["particular"][0], "1/5");
    assert_eq!(v["renorm"], "10/3");
}
