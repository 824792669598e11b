//! RK4 segment integration, zero location and Sturm-type comparisons.

mod common;

use std::f64::consts::PI;

use common::{c, disk};
use proptest::prelude::*;
use schwarzkit::expr::{parse, Expr};
use schwarzkit::ode::{
    disconjugacy_trial, find_zeros, integrate_segment, legendre_lower_bound, lemma1_residual, SegmentPath,
};
use schwarzkit::schwarzian::NehariProfile;

fn real_axis() -> SegmentPath {
    SegmentPath::new(c(-0.99, 0.0), c(0.99, 0.0)).unwrap()
}

#[test]
fn constant_potentials_give_sine_zeros() {
    // u(-0.99) = 0, u' = 1 with ψ = k²: zeros at -0.99 + jπ/k
    let mut last = 0;
    for k in [1.0f64, 2.0, 3.0, 4.0] {
        let sol = integrate_segment(&Expr::real(k * k), real_axis(), c(0.0, 0.0), c(1.0, 0.0), 20_000).unwrap();
        let rec = find_zeros(&sol).unwrap();
        let expected: Vec<f64> = (0..).map(|j| j as f64 * PI / k).take_while(|s| *s <= 1.98).collect();
        assert_eq!(rec.count, expected.len(), "ψ = {}", k * k);
        for (z, e) in rec.zeros.iter().zip(&expected) {
            assert!((z - e).abs() < 1e-9, "ψ = {}: zero {z} vs {e}", k * k);
        }
        // Sturm comparison: a larger potential never has fewer zeros
        assert!(rec.count >= last);
        last = rec.count;
    }
}

#[test]
fn rk4_error_drops_sixteenfold_per_halving() {
    let psi = Expr::real(9.0);
    let path = SegmentPath::new(c(0.0, 0.0), c(0.9, 0.0)).unwrap();
    let err = |n: usize| {
        let sol = integrate_segment(&psi, path, c(0.0, 0.0), c(1.0, 0.0), n).unwrap();
        (sol.u.last().unwrap() - (3.0f64 * 0.9).sin() / 3.0).norm()
    };
    let (e1, e2, e3) = (err(200), err(400), err(800));
    for ratio in [e1 / e2, e2 / e3] {
        assert!((14.0..18.0).contains(&ratio), "ratio {ratio}");
    }
}

#[test]
fn complex_segments_follow_closed_form() {
    // u'' + 4u = 0 along a slanted segment: u = sin(2(z-α))/2
    let (a, b) = (c(-0.3, -0.4), c(0.5, 0.6));
    let sol = integrate_segment(&Expr::real(4.0), SegmentPath::new(a, b).unwrap(), c(0.0, 0.0), c(1.0, 0.0), 4000).unwrap();
    let worst = sol
        .s
        .iter()
        .zip(&sol.u)
        .map(|(s, u)| (u - (2.0 * (sol.path.point(*s) - a)).sin() / 2.0).norm())
        .fold(0.0f64, f64::max);
    assert!(worst < 1e-11, "{worst}");
}

#[test]
fn too_few_steps_are_rejected() {
    let psi = Expr::real(1e4);
    let res = integrate_segment(&psi, real_axis(), c(0.0, 0.0), c(1.0, 0.0), 200);
    assert!(matches!(res, Err(schwarzkit::Error::StepsTooSmall { .. })), "{res:?}");
}

#[test]
fn legendre_counts_from_two_to_twelve() {
    for n in 2..=12 {
        assert_eq!(legendre_lower_bound(n).unwrap().record.count, n - 1);
    }
}

fn potentials() -> impl Strategy<Value = Expr> {
    prop_oneof![
        Just(parse("-3/(1 - z^2)^2").unwrap()),
        Just(parse("20").unwrap()),
        Just(parse("5*exp(2*z)").unwrap()),
        Just(parse("(1 + 2i)*z^2 - 4").unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn modulus_of_solution_obeys_lemma1(psi in potentials(), a in disk(0.85), b in disk(0.85), u0 in disk(1.0), du0 in disk(1.0)) {
        prop_assume!((a - b).norm() > 1e-3);
        prop_assume!(u0.norm() + du0.norm() > 1e-3);
        let sol = integrate_segment(&psi, SegmentPath::new(a, b).unwrap(), u0, du0, 20_000).unwrap();
        let rep = lemma1_residual(&sol, &psi).unwrap();
        prop_assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn nehari_profiles_are_disconjugate(x0 in -0.98..0.98f64, angle in 0.0..std::f64::consts::TAU, which in 0usize..3) {
        let profile = NehariProfile::ALL[which];
        let zeros = disconjugacy_trial(profile, x0, angle.cos(), angle.sin()).unwrap();
        prop_assert!(zeros <= 1, "{profile} from x0 = {x0}: {zeros} zeros");
    }
}

#[test]
fn sinusoid_gap_matches_separation_bound() {
    for cc in [8.0, 50.0, 500.0] {
        let sol = integrate_segment(&Expr::real(cc / 2.0), real_axis(), c(0.3, 0.0), c(-1.0, 0.0), 40_000).unwrap();
        let rec = find_zeros(&sol).unwrap();
        let gap = rec.min_gap.expect("at least two zeros");
        assert!((gap - PI * (2.0 / cc).sqrt()).abs() < 1e-9, "C = {cc}: gap {gap}");
    }
}
