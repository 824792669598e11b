//! Jet arithmetic, parsing and Schwarzian evaluation against independent oracles.

mod common;

use common::{c, cauchy_coeffs, disk, schwarzian_from_coeffs};
use num_complex::Complex64;
use proptest::prelude::*;
use schwarzkit::expr::{legendre_poly, parse, Expr};
use schwarzkit::geometry::MobiusSelfMap;
use schwarzkit::schwarzian::{nehari_check, schwarzian, NehariProfile};

/// Outer maps with singularities at distance ≥ 0.5 from `|z| ≤ 0.6`.
fn outer() -> impl Strategy<Value = Expr> {
    prop_oneof![
        Just(parse("exp(z)").unwrap()),
        Just(parse("sin(2*z) + z^2").unwrap()),
        Just(parse("log(2 + z)").unwrap()),
        Just(parse("sqrt(3 + z)").unwrap()),
        Just(Expr::koebe()),
        Just(Expr::tan_scaled(2.0).unwrap()),
        Just(Expr::mobius(c(1.0, 0.5), c(0.2, 0.0), c(0.3, 0.0), c(2.0, 0.0)).unwrap()),
    ]
}

fn inner() -> impl Strategy<Value = Expr> {
    prop_oneof![
        Just(parse("z^2/2 + z/3").unwrap()),
        Just(parse("0.4*sin(z)").unwrap()),
        Just(parse("z/(2 - z)").unwrap()),
        Just(parse("0.5*z + 0.1*z^3").unwrap()),
    ]
}

fn within(jet: Complex64, oracle: Complex64) -> bool {
    (jet - oracle).norm() <= 1e-12 * jet.norm() + 1e-6
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composed_jets_match_difference_oracles(f in outer(), g in inner(), z in disk(0.6)) {
        let fg = Expr::compose(f, g);
        let jet = fg.eval_jet(z, 6).unwrap();
        let eval = |w: Complex64| fg.eval(w).unwrap();
        // first coefficient: central difference with step 1e-5
        let h = 1e-5;
        let d1 = (eval(z + h) - eval(z - h)) / (2.0 * h);
        prop_assert!(within(jet.coeffs()[1], d1), "c1 {} vs {}", jet.coeffs()[1], d1);
        // higher coefficients: Cauchy integral on a small circle
        let a = cauchy_coeffs(eval, z, 0.05, 32, 6);
        for (k, (got, want)) in jet.coeffs().iter().zip(&a).enumerate() {
            prop_assert!(within(*got, *want), "c{k} {got} vs {want}");
        }
    }

    #[test]
    fn schwarzian_matches_circle_oracle(f in outer(), z in disk(0.5)) {
        let s = schwarzian(&f, z).unwrap();
        let a = cauchy_coeffs(|w| f.eval(w).unwrap(), z, 0.05, 32, 3);
        let oracle = schwarzian_from_coeffs(&a);
        prop_assert!((s - oracle).norm() <= 1e-5 * s.norm().max(1.0), "{s} vs {oracle}");
    }

    #[test]
    fn mobius_post_composition_leaves_schwarzian_unchanged(
        f in outer(), z in disk(0.5), a in disk(0.8), theta in 0.0..std::f64::consts::TAU,
    ) {
        let t = MobiusSelfMap::new(a, theta).unwrap().to_expr();
        let s = schwarzian(&f, z).unwrap();
        if let Ok(st) = schwarzian(&Expr::compose(t, f), z) {
            prop_assert!((s - st).norm() <= 1e-8 * s.norm().max(1.0), "{s} vs {st}");
        }
    }

    #[test]
    fn printed_expressions_reparse(f in outer(), g in inner(), z in disk(0.5)) {
        let e = Expr::compose(f, g.clone()) * g + Expr::real(-1.5);
        let back = parse(&e.to_string()).unwrap();
        let (a, b) = (e.eval(z).unwrap(), back.eval(z).unwrap());
        prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn legendre_polynomials_solve_their_equation(n in 0usize..=50, x in -1.0..1.0f64) {
        let p = legendre_poly(n).unwrap();
        let (d1, d2) = (p.derivative(), p.derivative().derivative());
        let nf = n as f64;
        let r = (1.0 - x * x) * d2.eval(x) - 2.0 * x * d1.eval(x) + nf * (nf + 1.0) * p.eval(x);
        // monomial evaluation loses digits in proportion to the coefficient mass
        let mass: f64 = d2.coeffs().iter().map(|c| c.abs()).sum::<f64>() + nf * nf * p.max_abs_coeff();
        prop_assert!(r.abs() <= 1e-13 * mass.max(1.0), "n={n} x={x} residual {r}");
    }
}

#[test]
fn pokornyi_profile_separates_koebe_from_its_dilation() {
    let samples: Vec<Complex64> = (0..400)
        .map(|j| Complex64::from_polar((j % 20) as f64 / 20.0 * 0.99, j as f64 * 0.37))
        .collect();
    let small: Vec<Complex64> = samples.iter().map(|z| z / 3.0).collect();
    let k = Expr::koebe();
    // |Sk(0)| = 6 exceeds 2p(0) = 4
    assert!(!nehari_check(&k, NehariProfile::Pokornyi, &small).unwrap().pass);
    let dilated = Expr::compose(k, Expr::Var / Expr::real(3.0));
    for p in NehariProfile::ALL {
        let rep = nehari_check(&dilated, p, &samples).unwrap();
        assert!(rep.pass, "{p}: {rep:?}");
    }
}

#[test]
fn tan_scaled_meets_the_constant_profile_with_equality() {
    let f = Expr::tan_scaled(std::f64::consts::PI.powi(2) / 2.0).unwrap();
    let samples: Vec<Complex64> = (0..50).map(|j| Complex64::from_polar(0.9 * j as f64 / 50.0, j as f64)).collect();
    let rep = nehari_check(&f, NehariProfile::NehariConstant, &samples).unwrap();
    assert!(rep.pass);
    assert!((rep.worst_ratio - 1.0).abs() < 1e-12);
}
