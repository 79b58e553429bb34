use dyadic_core::expr::{harmonic_basis, parse, HarmonicBasisSpec};
use dyadic_core::grid::{
    center_of, grid_averages, interior_mask, neighbor_average_sum, word_to_cell, CellAddress,
};
use dyadic_core::quadrature::{cell_average, GaussLegendre};
use dyadic_core::rational::to_f64;
use dyadic_core::stencil::{t_pk, StencilPair};
use dyadic_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn word_examples() {
    assert_eq!(word_to_cell(&CellAddress::root()), ([0.5, 0.5], 1.0));
    assert_eq!(word_to_cell(&CellAddress::new(vec![1]).unwrap()), ([0.25, 0.25], 0.5));
    assert_eq!(word_to_cell(&CellAddress::new(vec![3, 3]).unwrap()), ([0.875, 0.875], 0.25));
    assert!(matches!(CellAddress::new(vec![2, 7]), Err(Error::InvalidDigit(7))));
}

#[test]
fn words_biject_onto_coordinates() {
    for len in 0..=6u32 {
        let n = 1usize << len;
        let mut seen = vec![false; n * n];
        for code in 0..4usize.pow(len) {
            let word: Vec<u8> = (0..len).map(|k| (code / 4usize.pow(k) % 4) as u8 + 1).collect();
            let w = CellAddress::new(word).unwrap();
            let (i, j) = w.coords();
            assert!(!seen[j * n + i]);
            seen[j * n + i] = true;
            assert_eq!(CellAddress::from_coords(len, i, j).unwrap(), w);
            assert_eq!(word_to_cell(&w).0, center_of(len, i, j));
        }
        assert!(seen.iter().all(|&s| s));
    }
}

#[test]
fn average_examples() {
    let one = parse("1").unwrap();
    let avg = grid_averages(&one, 4, 3).unwrap();
    assert!(avg.finest().values().iter().all(|&v| (v - 1.0).abs() < 1e-15));
    let x = parse("x").unwrap();
    assert!((cell_average(&x, [0.3, 0.6], 0.2, 5).unwrap() - 0.3).abs() < 1e-15);
    let sq = parse("x^2+y^2").unwrap();
    let avg = grid_averages(&sq, 2, 4).unwrap();
    let l = 0.25;
    for j in 0..4 {
        for i in 0..4 {
            let c = center_of(2, i, j);
            let want = c[0] * c[0] + c[1] * c[1] + l * l / 6.0;
            assert!((avg.finest().get(i, j) - want).abs() < 1e-15);
        }
    }
}

#[test]
fn aggregation_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..3 {
        let (a, b, c) = (rng.gen_range(0.5..3.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.1..2.0));
        let f = parse(&format!("sin({a}*x+{b}*y)*exp({c}*y)+x^3")).unwrap();
        let avg = grid_averages(&f, 6, 8).unwrap();
        for m in 0..6 {
            let parent = avg.at(m).unwrap();
            let child = avg.at(m + 1).unwrap();
            for j in 0..parent.width() {
                for i in 0..parent.width() {
                    let mean = (child.get(2 * i, 2 * j)
                        + child.get(2 * i + 1, 2 * j)
                        + child.get(2 * i, 2 * j + 1)
                        + child.get(2 * i + 1, 2 * j + 1))
                        / 4.0;
                    assert!((parent.get(i, j) - mean).abs() <= 1e-13);
                }
            }
            let direct = grid_averages(&f, m, 8).unwrap();
            for (u, v) in parent.values().iter().zip(direct.finest().values()) {
                assert!((u - v).abs() <= 1e-13);
            }
        }
    }
}

#[test]
fn quadrature_exact_through_degree_2q_minus_1() {
    for q in 1..=12usize {
        let rule = GaussLegendre::<f64>::new(q).unwrap();
        let top = 2 * q as i32 - 1;
        for a in 0..=top {
            for b in 0..=top {
                let e = parse(&format!("x^{a}*y^{b}")).unwrap();
                let got = rule.average(&e, [0.5, 0.5], &1.0).unwrap();
                let want = 1.0 / ((a + 1) * (b + 1)) as f64;
                assert!(((got - want) / want).abs() <= 1e-13, "q={q} a={a} b={b}");
            }
        }
    }
}

#[test]
fn interior_sets() {
    let axis = [StencilPair::new(0, 1)];
    assert_eq!(interior_mask(1, &axis).count(), 0);
    assert_eq!(interior_mask(2, &axis).cells().collect::<Vec<_>>(), vec![(1, 1), (2, 1), (1, 2), (2, 2)]);
    for m in 1..=6u32 {
        assert_eq!(interior_mask(m, &axis).count(), ((1usize << m) - 2).pow(2));
    }
}

#[test]
fn neighbor_sums_of_basis() {
    let x = [0.5, 0.5];
    let l = 0.125;
    for p in [(0, 1), (1, 1), (0, 2), (1, 2)].map(|(a, b)| StencilPair::new(a, b)) {
        for n in 1..=8 {
            let g = harmonic_basis(&HarmonicBasisSpec::g(n, x)).unwrap();
            assert!(neighbor_average_sum(&g, x, l, p, 12).unwrap().abs() <= 1e-12);
            if n % 4 != 0 {
                let f = harmonic_basis(&HarmonicBasisSpec::f(n, x)).unwrap();
                assert!(neighbor_average_sum(&f, x, l, p, 12).unwrap().abs() <= 1e-12);
            }
        }
    }
    let f4 = harmonic_basis(&HarmonicBasisSpec::f(4, x)).unwrap();
    let p = StencilPair::new(0, 1);
    let want = to_f64(&t_pk(p, 1)) / 720.0 * (l / 2.0f64).powi(4);
    let got = neighbor_average_sum(&f4, x, l, p, 12).unwrap();
    assert!(((got - want) / want).abs() <= 1e-12);
}

#[test]
fn domain_errors_propagate() {
    let e = parse("log(x-0.5)").unwrap();
    assert!(matches!(grid_averages(&e, 2, 4), Err(Error::Domain(_))));
}
