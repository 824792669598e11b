//! Preimage counting, packing bounds and the annulus construction.

mod common;

use std::f64::consts::PI;

use common::c;
use num_complex::Complex64;
use proptest::prelude::*;
use schwarzkit::expr::{parse, Expr};
use schwarzkit::valence::{
    count_valence, epsilon, lemma2_bound, next_radius, packing_check, phi_step, tan_zero_census, theorem2_breakdown,
    valence_bound_const, DEFAULT_NODES,
};

/// Functions with hand-counted preimages in `|z| < 0.9`:
/// (function, target, zeros with multiplicity, poles).
fn corpus() -> Vec<(Expr, Complex64, usize, usize)> {
    let p = |s: &str| parse(s).unwrap();
    vec![
        (p("z"), c(0.0, 0.0), 1, 0),
        (p("z^2"), c(0.0, 0.0), 2, 0),
        (p("z^3 - 0.125"), c(0.0, 0.0), 3, 0),
        (p("(z - 0.3)*(z + 0.4i)"), c(0.0, 0.0), 2, 0),
        (p("(z - 0.3)*(z - 0.95)"), c(0.0, 0.0), 1, 0),
        (p("exp(z) - 1"), c(0.0, 0.0), 1, 0),
        (p("sin(4*z)"), c(0.0, 0.0), 3, 0),
        (Expr::koebe(), c(0.0, 0.0), 1, 0),
        // z² + 3z + 1 = 0 gives the preimage (√5 - 3)/2
        (Expr::koebe(), c(-0.2, 0.0), 1, 0),
        // zeros kπ/5 for k = -1, 0, 1; of the poles (k+½)π/5 only ±0.314 lie inside
        (Expr::tan_scaled(50.0).unwrap(), c(0.0, 0.0), 3, 2),
    ]
}

#[test]
fn contour_counts_match_hand_counts() {
    for (f, w, zeros, poles) in corpus() {
        let rep = count_valence(&f, w, 0.9, DEFAULT_NODES).unwrap();
        assert_eq!(rep.count, zeros, "{f} = {w}");
        assert_eq!(rep.poles.len(), poles, "{f}: poles {:?}", rep.poles);
        assert_eq!(rep.winding, Some(zeros as i64 - poles as i64), "{f}");
        assert!(rep.winding_residual.unwrap() < 0.01);
        for z in &rep.preimages {
            assert!((f.eval(*z).unwrap() - w).norm() < 1e-8, "{f} at {z}");
        }
    }
}

#[test]
fn tan_census_sits_between_the_envelopes() {
    for cc in [50.0, 200.0, 800.0] {
        let t = tan_zero_census(cc).unwrap();
        assert!(t.lower_ok && t.upper_ok, "C = {cc}: {t:?}");
        // oracle: zeros kπ√(2/C) with |k π√(2/C)| < 1
        let s = PI * (2.0 / cc).sqrt();
        let k_max = ((1.0 - 1e-12) / s).floor() as usize;
        assert_eq!(t.report.count, 2 * k_max + 1);
        assert!(packing_check(&t.report, cc).unwrap().pass);
    }
}

#[test]
fn breakdown_on_a_geometric_grid() {
    let mut last_total = 0;
    for k in 0..18 {
        let cc = 2.1 * 1.5f64.powi(k);
        let b = theorem2_breakdown(cc).unwrap();
        assert!(b.radii.windows(2).all(|w| w[1] > w[0]), "C = {cc}");
        assert!(b.radii.iter().all(|r| *r <= b.r));
        assert!(b.phi_d_residual < 1e-10);
        assert_eq!(b.total, b.inner_unit + b.inner_sum + b.gap_annulus_count + b.rectangle_count);
        assert!(b.total >= last_total, "C = {cc}: {} < {last_total}", b.total);
        last_total = b.total;
    }
}

#[test]
fn breakdown_at_four_by_hand() {
    // ε = π/4, r₀ = ε/√(1+ε²), R² = 15/16
    let b = theorem2_breakdown(4.0).unwrap();
    let eps = PI / 4.0;
    assert!((b.r0 - eps / (1.0 + eps * eps).sqrt()).abs() < 1e-15);
    assert!((b.r - (15.0f64 / 16.0).sqrt()).abs() < 1e-15);
    assert_eq!((b.m, b.inner_sum, b.gap_annulus_count, b.rectangle_count, b.total), (1, 20, 32, 63, 116));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn steps_solve_their_defining_equation(a in 0.0..0.999f64, log_c in (2.1f64).ln()..(1e6f64).ln()) {
        let eps = epsilon(log_c.exp());
        let (x, d) = next_radius(a, eps).unwrap();
        prop_assert!((x - a - d).abs() <= 1e-15);
        prop_assert!((d - eps * (1.0 - x * x).sqrt()).abs() <= 1e-12 * d);
        prop_assert!((phi_step(a, eps).unwrap() * d - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn valence_bound_grows_with_c(c1 in 4.94f64..1e4, factor in 1.0f64..10.0) {
        let (b1, b2) = (valence_bound_const(c1).unwrap(), valence_bound_const(c1 * factor).unwrap());
        prop_assert!(b2.value >= b1.value && b2.cap >= b1.cap);
        prop_assert!(b1.cap as f64 <= b1.value + 1e-8);
    }

    #[test]
    fn annulus_packing_count(d in 1e-6f64..=1.0) {
        let n = lemma2_bound(d).unwrap();
        prop_assert!(n as f64 * d <= 2.0 * PI + 1e-12 && (n + 1) as f64 * d > 2.0 * PI - 1e-12);
    }
}
