use dyadic_core::rational::{rat, to_f64};
use dyadic_core::stencil::{
    c_value, mean_value_level, neighbor_offsets, parse_pairs, renorm_constant, t_bound, t_pk,
    t_pk_sine, MeanValueLevel, StencilFamily, StencilPair,
};
use dyadic_core::{Error, Rational};
use num_traits::Signed;
use proptest::prelude::*;

fn p(a: u32, b: u32) -> StencilPair {
    StencilPair::new(a, b)
}

fn canonical(max: u32) -> impl Iterator<Item = StencilPair> {
    (0..=max).flat_map(move |b| (0..=b).map(move |a| p(a, b)))
}

#[test]
fn multiplicity_constants() {
    assert_eq!(c_value(p(0, 0)), rat(1, 8));
    assert_eq!(c_value(p(0, 1)), rat(1, 2));
    assert_eq!(c_value(p(1, 1)), rat(1, 2));
    assert_eq!(c_value(p(1, 2)), rat(1, 1));
    assert_eq!(c_value(p(2, 1)), rat(1, 1));
}

#[test]
fn offsets() {
    assert_eq!(neighbor_offsets(p(0, 0)), vec![(0, 0)]);
    let mut axis = neighbor_offsets(p(0, 1));
    axis.sort();
    assert_eq!(axis, vec![(-1, 0), (0, -1), (0, 1), (1, 0)]);
    assert_eq!(neighbor_offsets(p(1, 2)).len(), 8);
    for q in canonical(5) {
        let n = neighbor_offsets(q).len() as i64;
        assert_eq!(Rational::from_integer(n.into()), rat(8, 1) * c_value(q), "{q}");
    }
}

#[test]
fn moments() {
    assert_eq!(t_pk(StencilPair::THETA, 0), rat(2, 1));
    assert_eq!(t_pk(StencilPair::THETA, 1), rat(-8, 1));
    assert_eq!(t_pk(StencilPair::THETA, 2), rat(32, 1));
    assert_eq!(t_pk(p(0, 1), 1), rat(1888, 1));
    assert_eq!(t_pk(p(1, 1), 1), rat(-7712, 1));
    for k in 0..=12u32 {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        assert_eq!(t_pk(StencilPair::THETA, k), rat(sign << (2 * k + 1), 1));
    }
    for q in canonical(5) {
        assert_eq!(t_pk(q, 0), rat(16, 1) * c_value(q), "{q}");
    }
}

#[test]
fn moment_bounds() {
    assert_eq!(t_bound(p(0, 0), 0), rat(2, 1));
    assert_eq!(t_bound(p(0, 1), 1), rat(4000, 1));
    assert_eq!(t_bound(p(1, 1), 1), rat(23328, 1));
    for q in canonical(5) {
        for k in 0..=10 {
            assert!(t_pk(q, k).abs() <= t_bound(q, k), "{q} k={k}");
        }
    }
}

#[test]
fn sine_form_agrees() {
    for q in canonical(3) {
        for k in 0..=4 {
            let exact = to_f64(&t_pk(q, k));
            let sine = t_pk_sine(q, k);
            assert!((sine - exact).abs() <= 1e-9 * exact.abs().max(1.0), "{q} k={k}: {sine} vs {exact}");
        }
    }
}

#[test]
fn renormalization() {
    assert_eq!(renorm_constant(&[p(0, 1)], &[rat(1, 4)]).unwrap(), rat(4, 1));
    assert_eq!(
        renorm_constant(&[p(0, 1), p(1, 1)], &[rat(1, 5), rat(1, 20)]).unwrap(),
        rat(10, 3)
    );
    let all = [p(0, 1), p(1, 1), p(0, 2), p(1, 2)];
    let a = [rat(38, 183), rat(103, 2379), rat(-17, 9516), rat(1, 2379)];
    assert_eq!(renorm_constant(&all, &a).unwrap(), rat(793, 231));
    assert!(matches!(
        renorm_constant(&[p(0, 1), p(0, 2)], &[rat(4, 1), rat(-1, 1)]),
        Err(Error::ZeroDenominator)
    ));
}

#[test]
fn levels() {
    assert_eq!(mean_value_level(&[p(0, 1)], &[rat(1, 4)], 4), MeanValueLevel::Exact(1));
    assert_eq!(
        mean_value_level(&[p(0, 1), p(1, 1)], &[rat(1, 5), rat(1, 20)], 4),
        MeanValueLevel::Exact(2)
    );
    assert_eq!(mean_value_level(&[p(0, 1)], &[rat(1, 8)], 4), MeanValueLevel::Exact(0));
}

#[test]
fn family_rejects_unnormalized_coefficients() {
    assert!(matches!(
        StencilFamily::new(vec![p(0, 1)], vec![rat(1, 8)]),
        Err(Error::NormalizationViolated { .. })
    ));
    assert!(matches!(
        StencilFamily::new(vec![p(0, 1), p(1, 0)], vec![rat(1, 8), rat(1, 8)]),
        Err(Error::DuplicatePair { .. })
    ));
    assert!(matches!(parse_pairs("(0,-1)"), Err(Error::NonCanonicalPair { .. })));
    assert_eq!(parse_pairs("(2,1), (0,1)").unwrap(), vec![p(1, 2), p(0, 1)]);
}

#[test]
fn json_round_trip() {
    let s = StencilFamily::parse_inline("(0,1),(1,1)", "1/5,1/20").unwrap();
    let text = s.to_json().unwrap();
    let back = StencilFamily::from_json(&text).unwrap();
    assert_eq!(back, s);
    let file = r#"{"pairs": [[0,1],[1,1]], "coefficients": ["1/5","1/20"], "renorm": "10/3", "level": 2}"#;
    assert_eq!(StencilFamily::from_json(file).unwrap(), s);
    let wrong = r#"{"pairs": [[0,1],[1,1]], "coefficients": ["1/5","1/20"], "renorm": "4", "level": 2}"#;
    assert!(matches!(StencilFamily::from_json(wrong), Err(Error::InconsistentStencil { .. })));
}

proptest! {
    #[test]
    fn canonicalization_is_symmetric(a in 0u32..20, b in 0u32..20) {
        prop_assert_eq!(p(a, b), p(b, a));
        prop_assert_eq!(t_pk(p(a, b), 2), t_pk(p(b, a), 2));
    }

    #[test]
    fn bound_holds_for_random_pairs(a in 0u32..12, b in 0u32..12, k in 0u32..8) {
        prop_assert!(t_pk(p(a, b), k).abs() <= t_bound(p(a, b), k));
    }
}
