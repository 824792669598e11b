//! Harmonic Schwarzian, Koebe shears, the minimal-surface lift and planar preimages.

mod common;

use common::{c, disk};
use num_complex::Complex64;
use proptest::prelude::*;
use schwarzkit::expr::{parse, Expr};
use schwarzkit::geometry::MobiusSelfMap;
use schwarzkit::harmonic::{
    harmonic_norm_estimate, harmonic_preimages, harmonic_schwarzian, lift, lift_criterion_value, shear_koebe,
    shear_koebe_schwarzian_closed_form, HarmonicMap, PreimageGrid,
};
use schwarzkit::norm::GridSpec;
use schwarzkit::schwarzian::schwarzian;

fn maps() -> Vec<HarmonicMap> {
    vec![
        shear_koebe(0.0).unwrap(),
        shear_koebe(2.0).unwrap(),
        HarmonicMap::new(parse("z + 0.2*z^2").unwrap(), parse("0.3*z + 0.1").unwrap()),
        HarmonicMap::new(parse("exp(z) - 1").unwrap(), parse("0.5*sin(z)").unwrap()),
    ]
}

fn map_index() -> impl Strategy<Value = usize> {
    0usize..4
}

/// `σ = log(|h'|(1+|q|²))` from first derivatives only.
fn sigma(m: &HarmonicMap, z: Complex64) -> f64 {
    let h1 = m.h.eval_jet(z, 1).unwrap().derivative(1);
    (h1.norm() * (1.0 + m.q.eval(z).unwrap().norm_sqr())).ln()
}

/// Fourth-order central differences of σ: `(σ_x, σ_y, σ_xx, σ_yy, σ_xy)`.
fn sigma_partials(m: &HarmonicMap, z: Complex64, h: f64) -> [f64; 5] {
    let s = |i: i32, j: i32| sigma(m, z + c(i as f64 * h, j as f64 * h));
    let d1 = [(-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)];
    let sx = d1.iter().map(|(k, w)| w * s(*k, 0)).sum::<f64>() / (12.0 * h);
    let sy = d1.iter().map(|(k, w)| w * s(0, *k)).sum::<f64>() / (12.0 * h);
    let d2 = |f: &dyn Fn(i32) -> f64| (-f(2) + 16.0 * f(1) - 30.0 * f(0) + 16.0 * f(-1) - f(-2)) / (12.0 * h * h);
    let sxx = d2(&|k| s(k, 0));
    let syy = d2(&|k| s(0, k));
    let sxy = d1
        .iter()
        .flat_map(|(i, wi)| d1.iter().map(move |(j, wj)| (*i, *j, wi * wj)))
        .map(|(i, j, w)| w * s(i, j))
        .sum::<f64>()
        / (144.0 * h * h);
    [sx, sy, sxx, syy, sxy]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn wirtinger_derivatives_match_differences(i in map_index(), z in disk(0.6)) {
        let m = &maps()[i];
        let [sx, sy, sxx, syy, sxy] = sigma_partials(m, z, 1e-3);
        let jet = m.sigma_jet(z).unwrap();
        let sz = c(0.5 * sx, -0.5 * sy);
        let szz = c(0.25 * (sxx - syy), -0.5 * sxy);
        prop_assert!((jet.sigma - sigma(m, z)).abs() <= 1e-13 * jet.sigma.abs().max(1.0));
        prop_assert!((jet.sigma_z - sz).norm() <= 1e-7 * jet.sigma_z.norm().max(1.0), "{} vs {sz}", jet.sigma_z);
        prop_assert!((jet.sigma_zz - szz).norm() <= 1e-5 * jet.sigma_zz.norm().max(1.0), "{} vs {szz}", jet.sigma_zz);
        let s_fd = 2.0 * (szz - sz * sz);
        let s = harmonic_schwarzian(m, z).unwrap();
        prop_assert!((s - s_fd).norm() <= 1e-5 * s.norm().max(1.0));
    }

    #[test]
    fn analytic_maps_reduce_to_the_classical_schwarzian(z in disk(0.9), which in 0usize..3) {
        let h = [Expr::koebe(), Expr::tan_scaled(3.0).unwrap(), parse("exp(z) + z^3/5").unwrap()][which].clone();
        let a = harmonic_schwarzian(&HarmonicMap::analytic(h.clone()), z).unwrap();
        let b = schwarzian(&h, z).unwrap();
        prop_assert!((a - b).norm() <= 1e-10 * b.norm().max(1.0));
    }

    #[test]
    fn unrotated_shear_matches_closed_form(z in disk(0.95)) {
        let s = harmonic_schwarzian(&shear_koebe(0.0).unwrap(), z).unwrap();
        let want = shear_koebe_schwarzian_closed_form(z);
        prop_assert!((s - want).norm() <= 1e-10 * want.norm().max(1.0), "{s} vs {want}");
    }

    #[test]
    fn shears_satisfy_their_defining_relations(theta in 0.0..std::f64::consts::TAU, z in disk(0.8)) {
        let m = shear_koebe(theta).unwrap();
        let b = Complex64::from_polar(1.0, theta / 2.0);
        // h' = k'/(1 - e^{iθ}z²) with k' = (1+z)/(1-z)³
        let h1 = m.h.eval_jet(z, 1).unwrap().derivative(1);
        let want = (1.0 + z) / (1.0 - z).powi(3) / (1.0 - b * b * z * z);
        prop_assert!((h1 - want).norm() <= 1e-10 * want.norm());
        prop_assert!((m.q.eval(z).unwrap() - b * z).norm() <= 1e-15);
        if theta == 0.0 {
            let k = z / (1.0 - z).powi(2);
            let g = m.g(z).unwrap();
            prop_assert!((m.h.eval(z).unwrap() - g - k).norm() <= 1e-10 * k.norm().max(1.0));
        }
    }

    #[test]
    fn lift_is_conformal_with_the_predicted_factor(i in map_index(), z in disk(0.7)) {
        let s = lift(&maps()[i], z).unwrap();
        prop_assert!(s.is_conformal(), "{s:?}");
    }

    #[test]
    fn curvature_density_is_the_laplacian_of_sigma(i in map_index(), z in disk(0.6)) {
        let m = &maps()[i];
        let [_, _, sxx, syy, _] = sigma_partials(m, z, 1e-3);
        let density = m.curvature_density(z).unwrap();
        prop_assert!((density - (sxx + syy).abs()).abs() <= 1e-5, "{density} vs {}", sxx + syy);
    }
}

#[test]
fn zero_angle_shear_and_g_agree_with_koebe_identity() {
    let m = shear_koebe(0.0).unwrap();
    for j in 0..40 {
        let z = Complex64::from_polar(0.95 * j as f64 / 40.0, 0.7 * j as f64);
        let k = z / (1.0 - z).powi(2);
        let diff = m.h.eval(z).unwrap() - m.g(z).unwrap() - k;
        assert!(diff.norm() <= 1e-10 * k.norm().max(1.0), "z = {z}: {diff}");
    }
}

#[test]
fn harmonic_norm_is_automorphism_invariant() {
    let m = HarmonicMap::new(parse("z + 0.2*z^2").unwrap(), parse("0.3*z + 0.1").unwrap());
    let grid = GridSpec::default();
    let base = harmonic_norm_estimate(&m, &grid).unwrap().lower_bound;
    for (a, t) in [(c(0.4, -0.2), 0.5), (c(-0.6, 0.3), 2.0), (c(0.1, 0.7), 4.0)] {
        let phi = MobiusSelfMap::new(a, t).unwrap().to_expr();
        let moved = harmonic_norm_estimate(&m.compose(&phi), &grid).unwrap().lower_bound;
        assert!((moved - base).abs() <= 1e-3, "{moved} vs {base}");
    }
}

#[test]
fn shear_has_a_single_preimage_of_each_target() {
    let m = shear_koebe(0.0).unwrap();
    for z0 in [c(0.1, 0.2), c(-0.5, 0.3), c(0.6, -0.4), c(-0.2, -0.7)] {
        let w = m.f(z0).unwrap();
        let rep = harmonic_preimages(&m, w, &PreimageGrid::default(), None).unwrap();
        assert_eq!(rep.report.count, 1, "w = {w}: {:?}", rep.report.preimages);
        assert!((rep.report.preimages[0] - z0).norm() < 1e-9);
        // a denser seed grid finds nothing new
        let dense = PreimageGrid { radial: 48, angular: 96, radius: 0.99 };
        assert_eq!(harmonic_preimages(&m, w, &dense, None).unwrap().report.count, 1);
    }
}

#[test]
fn tangent_variant_preimages_respect_the_criterion_separation() {
    // tan_scaled(C) has no poles in the disk for C ≤ π²/2; q = z
    let m = HarmonicMap::new(Expr::tan_scaled(4.0).unwrap(), Expr::Var);
    let c_star = (1..=40)
        .flat_map(|i| (0..80).map(move |j| Complex64::from_polar(0.97 * i as f64 / 40.0, 0.0785 * j as f64)))
        .map(|z| lift_criterion_value(&m, z).unwrap())
        .fold(0.0f64, f64::max);
    for z0 in [c(0.0, 0.0), c(0.3, 0.4), c(-0.6, 0.1)] {
        let w = m.f(z0).unwrap();
        let rep = harmonic_preimages(&m, w, &PreimageGrid::default(), Some(c_star)).unwrap();
        assert_eq!(rep.separation_ok, Some(true), "{rep:?}");
        assert!(rep.report.preimages.iter().any(|p| (p - z0).norm() < 1e-9));
        let dense = PreimageGrid { radial: 48, angular: 96, radius: 0.97 };
        assert_eq!(harmonic_preimages(&m, w, &dense, Some(c_star)).unwrap().report.count, rep.report.count);
    }
}
