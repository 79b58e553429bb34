use dyadic_core::expr::{harmonic_basis, parse, HarmonicBasisSpec};
use dyadic_core::forms::{
    dirichlet_reference, dirichlet_reference_with, discrete_laplacian, energy, gradient_norm_estimate,
    laplacian_max_error,
};
use dyadic_core::grid::{center_of, grid_averages, side_at};
use dyadic_core::mvp::{defect, DefectOptions};
use dyadic_core::stencil::StencilFamily;
use dyadic_core::verify::published_stencils;
use dyadic_core::{fit, Expr};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn axis() -> StencilFamily {
    published_stencils().remove(0)
}

fn energy_of(f: &Expr, g: &Expr, m: u32, s: &StencilFamily) -> f64 {
    let (a, b) = (grid_averages(f, m, 8).unwrap(), grid_averages(g, m, 8).unwrap());
    energy(a.finest(), b.finest(), s).unwrap()
}

#[test]
fn energy_closed_forms() {
    let (x, y) = (parse("x").unwrap(), parse("y").unwrap());
    let s = axis();
    let mut prev = 0.0;
    for m in 1..=6 {
        let e = energy_of(&x, &x, m, &s);
        assert!((e - (1.0 - side_at(m))).abs() <= 1e-12, "m={m}: {e}");
        assert!(e > prev);
        prev = e;
        assert!(energy_of(&x, &y, m, &s).abs() <= 1e-13);
    }
    assert_eq!(energy_of(&parse("2.5").unwrap(), &parse("2.5").unwrap(), 4, &s), 0.0);
}

#[test]
fn polarization_bilinearity_symmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for s in published_stencils() {
        for _ in 0..5 {
            let (a, b) = (rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0));
            let f = parse(&format!("sin({a}*x)*exp(y)+x*y")).unwrap();
            let g = parse(&format!("cos({b}*y)+x^2")).unwrap();
            let m = 4;
            let fg = energy_of(&f, &g, m, &s);
            let plus = energy_of(&(f.clone() + g.clone()), &(f.clone() + g.clone()), m, &s);
            let minus = energy_of(&(f.clone() - g.clone()), &(f.clone() - g.clone()), m, &s);
            assert!((fg - (plus - minus) / 4.0).abs() <= 1e-11 * fg.abs().max(1.0));
            assert!((fg - energy_of(&g, &f, m, &s)).abs() <= 1e-14 * fg.abs().max(1.0));
            let two_f = Expr::Const(2.0) * f.clone();
            assert!((energy_of(&two_f, &g, m, &s) - 2.0 * fg).abs() <= 1e-13 * fg.abs().max(1.0));
        }
    }
}

#[test]
fn dirichlet_references() {
    let (x, y) = (parse("x").unwrap(), parse("y").unwrap());
    assert!((dirichlet_reference(&x, &x, 4).unwrap() - 1.0).abs() < 1e-13);
    assert!(dirichlet_reference(&x, &y, 4).unwrap().abs() < 1e-13);
    let r = parse("x^2+y^2").unwrap();
    assert!((dirichlet_reference(&r, &r, 4).unwrap() - 8.0 / 3.0).abs() < 1e-13);
    let f = parse("sin(x)*exp(y)").unwrap();
    let coarse = dirichlet_reference(&f, &f, 8).unwrap();
    let fine = dirichlet_reference_with(&f, &f, 8, 64).unwrap();
    assert!((coarse - fine).abs() <= 1e-10);
    assert!((coarse - (1f64.exp().powi(2) - 1.0) / 2.0).abs() <= 1e-12);
}

#[test]
fn energy_converges_to_dirichlet_integral() {
    let f = parse("sin(x)*exp(y)").unwrap();
    let reference = dirichlet_reference(&f, &f, 8).unwrap();
    let s = axis();
    let avg = grid_averages(&f, 8, 8).unwrap();
    let errs: Vec<f64> = (2..=8)
        .map(|m| (energy(avg.at(m).unwrap(), avg.at(m).unwrap(), &s).unwrap() - reference).abs())
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]));
    let sides: Vec<f64> = (2..=8).map(side_at).collect();
    assert!(fit::convergence_order(&sides, &errs).unwrap() >= 0.8);
}

#[test]
fn laplacian_examples() {
    for s in published_stencils() {
        for text in ["x", "y", "x+y"] {
            let avg = grid_averages(&parse(text).unwrap(), 4, 4).unwrap();
            let field = discrete_laplacian(avg.finest(), &s).unwrap();
            assert!(field.interior().all(|(_, _, v)| v.abs() <= 1e-12), "{text}");
        }
        let f2 = harmonic_basis(&HarmonicBasisSpec::f(2, [0.4, 0.6])).unwrap();
        let avg = grid_averages(&f2, 4, 6).unwrap();
        let field = discrete_laplacian(avg.finest(), &s).unwrap();
        assert!(field.interior().all(|(_, _, v)| v.abs() <= 1e-10));
    }
    let sq = parse("x^2+y^2").unwrap();
    for m in 2..=7 {
        let avg = grid_averages(&sq, m, 4).unwrap();
        let field = discrete_laplacian(avg.finest(), &axis()).unwrap();
        assert!(field.interior().all(|(_, _, v)| (v - 4.0).abs() <= 1e-10));
        // Boundary cells carry no value.
        assert_eq!(field.get(0, 0), None);
    }
}

#[test]
fn harmonic_superconvergence() {
    let h = parse("sin(x)*exp(y)").unwrap();
    let stencils = published_stencils();

    // Level 1: the double-precision field itself, over m = 3..7.
    let avg = grid_averages(&h, 7, 12).unwrap();
    let levels: Vec<u32> = (3..=7).collect();
    let errs: Vec<f64> = levels
        .iter()
        .map(|&m| laplacian_max_error(&discrete_laplacian(avg.at(m).unwrap(), &stencils[0]).unwrap(), &h).unwrap())
        .collect();
    let sides: Vec<f64> = levels.iter().map(|&m| side_at(m)).collect();
    assert!(fit::convergence_order(&sides, &errs).unwrap() >= 1.7);

    // Level 2: |Δ_m h| ~ l^6 sinks below double rounding by m = 5, so the
    // rate is read from the identity Δ_m h(x_w) = -M_P 4^m defect(h, x_w, l),
    // with the defect in extended precision.
    let s = &stencils[1];
    let renorm = dyadic_core::rational::to_f64(s.renorm());
    let levels: Vec<u32> = (2..=7).collect();
    let avg = grid_averages(&h, 4, 12).unwrap();
    let values: Vec<f64> = levels
        .iter()
        .map(|&m| {
            let n = 1usize << m;
            let x = center_of(m, n / 2, n / 2);
            let d = defect(&h, x, side_at(m), s, &DefectOptions::default()).unwrap();
            let lap = -renorm * 4f64.powi(m as i32) * d;
            if m <= 4 {
                let field = discrete_laplacian(avg.at(m).unwrap(), s).unwrap();
                let direct = field.get(n / 2, n / 2).unwrap();
                assert!((direct - lap).abs() <= 1e-11, "m={m}: {direct} vs {lap}");
            }
            lap
        })
        .collect();
    let sides: Vec<f64> = levels.iter().map(|&m| side_at(m)).collect();
    let order = fit::convergence_order(&sides, &values).unwrap();
    assert!(order >= 6.0 - 0.3, "order {order}, values {values:?}");
}

#[test]
fn gradient_norms() {
    let s = axis();
    for m in 2..=5 {
        for (text, want) in [("3", 0.0), ("x", 1.0), ("x+y", 2.0)] {
            let avg = grid_averages(&parse(text).unwrap(), m, 4).unwrap();
            let g = avg.finest();
            let v = gradient_norm_estimate(g, (1, 1), &s, None).unwrap();
            assert!((v - want).abs() <= 1e-12, "{text} m={m}: {v}");
        }
    }
}
