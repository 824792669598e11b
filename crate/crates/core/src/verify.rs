//! The acceptance criteria as a library routine, so that command-line
//! builds can run them without the test harness.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::check::Check;
use crate::error::Result;
use crate::expr::{legendre_poly, parse, Expr};
use crate::geometry::{geodesic_rectangle, pseudo_disk, rho, MobiusSelfMap};
use crate::harmonic::{
    harmonic_composition_residual, harmonic_norm_estimate, harmonic_schwarzian, lift, lift_criterion_value,
    pommerenke_bound, shear_koebe, HarmonicMap,
};
use crate::norm::GridSpec;
use crate::ode::{
    disconjugacy_check, find_zeros, integrate_segment, legendre_lower_bound, legendre_ode_sign_changes,
    lemma1_residual, SegmentPath,
};
use crate::schwarzian::{composition_residual, nehari_check, schwarzian, schwarzian_norm_estimate, NehariProfile};
use crate::valence::{
    count_valence, empirical_band, integral_estimates, separation_bound, sweep, tan_zero_census, theorem2_breakdown,
    valence_bound_const, DEFAULT_NODES, WINDING_TOL,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub title: &'static str,
    pub checks: Vec<Check>,
}

impl CriterionOutcome {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub const CRITERIA: [(u32, &str); 9] = [
    (1, "Schwarzian closed forms"),
    (2, "Schwarzian norms and automorphism invariance"),
    (3, "separation and packing for tan_scaled(200)"),
    (4, "annulus and rectangle bound pipeline"),
    (5, "modulus inequality, sinusoid gaps, disconjugacy"),
    (6, "Legendre lower-bound construction"),
    (7, "pseudohyperbolic geometry and rectangles"),
    (8, "harmonic Schwarzian, composition and lift"),
    (9, "falsification harnesses"),
];

fn disk_point(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    Complex64::from_polar(r * rng.random::<f64>().sqrt(), rng.random_range(0.0..TAU))
}

fn automorphism(rng: &mut ChaCha8Rng) -> Result<MobiusSelfMap> {
    MobiusSelfMap::new(disk_point(rng, 0.8), rng.random_range(0.0..TAU))
}

/// Criterion `id`, with random samples drawn from a stream derived from `seed`.
pub fn run_criterion(id: u32, seed: u64) -> Result<CriterionOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id as u64);
    let checks = match id {
        1 => closed_forms(&mut rng)?,
        2 => norms(&mut rng)?,
        3 => desk_scale()?,
        4 => pipeline()?,
        5 => ode_checks(&mut rng, seed)?,
        6 => legendre()?,
        7 => geometry(&mut rng)?,
        8 => harmonic(&mut rng)?,
        9 => harnesses()?,
        _ => return Err(crate::Error::OutOfRange { what: "criterion number (1..=9)", value: id as f64 }),
    };
    let title = CRITERIA[id as usize - 1].1;
    Ok(CriterionOutcome { id, title, checks })
}

pub fn run_all(seed: u64) -> Result<Vec<CriterionOutcome>> {
    CRITERIA.iter().map(|(id, _)| run_criterion(*id, seed)).collect()
}

fn closed_forms(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let k = Expr::koebe();
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let z = disk_point(rng, 0.99);
        let want = -6.0 / (1.0 - z * z).powi(2);
        worst = worst.max((schwarzian(&k, z)? - want).norm() / want.norm());
    }
    let mut checks = vec![Check::at_most("koebe relative error", worst, 0.0, 1e-10)];
    for c in [5.0, PI * PI / 2.0, 200.0] {
        let f = Expr::tan_scaled(c)?;
        let spacing = PI * (2.0 / c).sqrt();
        let mut worst = 0.0f64;
        let mut tested = 0;
        while tested < 200 {
            let z = disk_point(rng, 0.99);
            if (-8..8).any(|j| (z - Complex64::new((j as f64 + 0.5) * spacing, 0.0)).norm() < 0.05) {
                continue;
            }
            worst = worst.max((schwarzian(&f, z)? - c).norm());
            tested += 1;
        }
        checks.push(Check::at_most(format!("tan_scaled({c}) deviation"), worst, 0.0, 1e-9));
    }
    Ok(checks)
}

fn norms(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let grid = GridSpec::default();
    let k = Expr::koebe();
    let shear = shear_koebe(0.0)?;
    let nk = schwarzian_norm_estimate(&k, &grid)?.lower_bound;
    let ns = harmonic_norm_estimate(&shear, &grid)?.lower_bound;
    let (mut drift_k, mut drift_s) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let phi = automorphism(rng)?.to_expr();
        drift_k = drift_k.max((schwarzian_norm_estimate(&Expr::compose(k.clone(), phi.clone()), &grid)?.lower_bound - nk).abs());
        drift_s = drift_s.max((harmonic_norm_estimate(&shear.compose(&phi), &grid)?.lower_bound - ns).abs());
    }
    Ok(vec![
        Check::near("koebe norm", nk, 6.0, 1e-6),
        Check::near("shear norm", ns, 16.0, 1e-3),
        Check::at_most("koebe norm drift", drift_k, 0.0, 1e-3),
        Check::at_most("shear norm drift", drift_s, 0.0, 1e-3),
    ])
}

fn desk_scale() -> Result<Vec<Check>> {
    let census = tan_zero_census(200.0)?;
    let sep = census.report.min_separation.unwrap_or(f64::NAN);
    let f = Expr::tan_scaled(200.0)?;
    let contour = count_valence(&f, Complex64::new(0.0, 0.0), 0.999, DEFAULT_NODES)?;
    let quarter = valence_bound_const(PI * PI / 2.0)?;
    Ok(vec![
        Check::near("zero count", census.report.count as f64, 7.0, 0.0),
        Check::near("min separation", sep, 0.1 * PI, 1e-12),
        Check::near("separation equals bound", sep, separation_bound(200.0)?, 1e-12),
        Check::at_most("count within valence bound", census.report.count as f64, census.bound.value, 0.0),
        Check::near("contour count", contour.count as f64, 7.0, 0.0),
        Check::at_most("winding residual", contour.winding_residual.unwrap_or(f64::NAN), WINDING_TOL, 0.0),
        Check::near("valence bound at π²/2", quarter.cap as f64, 4.0, 0.0),
    ])
}

fn pipeline() -> Result<Vec<Check>> {
    let cs = [4.0, 16.0, 64.0, 256.0, 1024.0];
    let mut checks = Vec::new();
    for &c in &cs {
        let b = theorem2_breakdown(c)?;
        checks.push(Check::at_most(format!("C={c}: |φd - 1|"), b.phi_d_residual, 0.0, 1e-10));
        checks.push(Check::at_most(
            format!("C={c}: inner sum vs 2π∫φ²"),
            b.inner_sum as f64,
            1.01 * (b.quadrature_envelope - 1.0),
            0.0,
        ));
        let est = integral_estimates(c)?;
        checks.push(Check::at_most(format!("C={c}: I1"), est.i1, est.i1_bound, 1e-6));
    }
    let band = empirical_band(&sweep(&cs)?);
    checks.push(Check::holds("ratios finite and positive", band.all_finite_positive));
    checks.push(Check::holds("ratios nonincreasing", band.nonincreasing));
    Ok(checks)
}

fn ode_checks(rng: &mut ChaCha8Rng, seed: u64) -> Result<Vec<Check>> {
    let psi_koebe = Expr::real(-3.0) / (Expr::real(1.0) - Expr::Var.powi(2)).powi(2);
    let psi_tan = Expr::real(20.0);
    let mut checks = Vec::new();
    for (name, psi) in [("koebe", &psi_koebe), ("tan_scaled(40)", &psi_tan)] {
        let mut worst = f64::INFINITY;
        for _ in 0..20 {
            let path = SegmentPath::new(disk_point(rng, 0.9), disk_point(rng, 0.9))?;
            let sol = integrate_segment(psi, path, disk_point(rng, 1.0), disk_point(rng, 1.0), 20_000)?;
            let rep = lemma1_residual(&sol, psi)?;
            worst = worst.min(rep.min_residual / rep.scale);
        }
        checks.push(Check::at_least(format!("{name}: scaled v'' + |ψ|v"), worst, 0.0, 1e-6));
    }
    for c in [20.0, 200.0, 2000.0] {
        let path = SegmentPath::new(Complex64::new(-0.99, 0.0), Complex64::new(0.99, 0.0))?;
        let sol = integrate_segment(&Expr::real(c / 2.0), path, 0.0.into(), 1.0.into(), 40_000)?;
        let gap = find_zeros(&sol)?.min_gap.unwrap_or(f64::NAN);
        checks.push(Check::near(format!("C={c}: sinusoid gap"), gap, PI * (2.0 / c).sqrt(), 1e-9));
    }
    for p in NehariProfile::ALL {
        let rep = disconjugacy_check(p, 100, seed)?;
        checks.push(Check::at_most(format!("{p}: zeros per trial"), rep.max_zeros as f64, 1.0, 0.0));
    }
    Ok(checks)
}

fn legendre() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for n in 2..=12 {
        let rep = legendre_lower_bound(n)?;
        checks.push(Check::near(format!("n={n}: zero count"), rep.record.count as f64, (n - 1) as f64, 0.0));
        let d = legendre_poly(n)?.derivative();
        let worst = rep.record.zeros.iter().map(|&x| d.eval(x).abs()).fold(0.0f64, f64::max);
        checks.push(Check::at_most(format!("n={n}: |P_n'| at zeros"), worst, 0.0, 1e-10));
    }
    for n in 2..=8 {
        let changes = legendre_ode_sign_changes(n)?;
        checks.push(Check::at_least(format!("n={n}: ODE sign changes"), changes as f64, (n - 1) as f64, 0.0));
    }
    Ok(checks)
}

fn geometry(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let m = automorphism(rng)?;
        let (a, b) = (disk_point(rng, 0.95), disk_point(rng, 0.95));
        worst = worst.max((rho(a, b)? - rho(m.apply(a), m.apply(b))?).abs());
    }
    let mut boundary = 0.0f64;
    for _ in 0..50 {
        let alpha = disk_point(rng, 0.9);
        let r = rng.random_range(0.05..0.95);
        let d = pseudo_disk(alpha, r)?;
        for j in 0..64 {
            boundary = boundary.max((rho(d.boundary_point(j as f64 * TAU / 64.0), alpha)? - r).abs());
        }
    }
    let (mut worst_y, mut worst_ratio) = (0.0f64, f64::INFINITY);
    for j in 0..=300 {
        let c = 10.0 * 1000f64.powf(j as f64 / 300.0);
        let g = geodesic_rectangle(c)?;
        worst_y = worst_y.max((g.y * g.y - 2.0 * c / (6.0 * c - 1.0)).abs());
        worst_ratio = worst_ratio.min(5.0 * c * g.half_angle);
    }
    Ok(vec![
        Check::at_most("ρ drift under automorphisms", worst, 0.0, 1e-12),
        Check::at_most("pseudo-disk boundary", boundary, 0.0, 1e-10),
        Check::at_most("y² closed form", worst_y, 0.0, 1e-12),
        Check::at_least("5C·half_angle", worst_ratio, 1.0, 0.0),
    ])
}

fn sigma_laplacian(m: &HarmonicMap, z: Complex64) -> Result<f64> {
    let h = 1e-3;
    let s = |dx: f64, dy: f64| -> Result<f64> { Ok(m.sigma_jet(z + Complex64::new(dx * h, dy * h))?.sigma) };
    let edge = s(1.0, 0.0)? + s(-1.0, 0.0)? + s(0.0, 1.0)? + s(0.0, -1.0)?;
    let corner = s(1.0, 1.0)? + s(1.0, -1.0)? + s(-1.0, 1.0)? + s(-1.0, -1.0)?;
    Ok((4.0 * edge + corner - 20.0 * s(0.0, 0.0)?) / (6.0 * h * h))
}

fn harmonic(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut reduction = 0.0f64;
    for h in [Expr::koebe(), Expr::tan_scaled(3.0)?, parse("exp(z) + z^3/5")?] {
        let m = HarmonicMap::analytic(h.clone());
        for _ in 0..100 {
            let z = disk_point(rng, 0.9);
            let b = schwarzian(&h, z)?;
            reduction = reduction.max((harmonic_schwarzian(&m, z)? - b).norm() / b.norm().max(1.0));
        }
    }
    let maps = [
        shear_koebe(0.0)?,
        HarmonicMap::new(parse("z + 0.2*z^2")?, parse("0.3*z + 0.1")?),
        HarmonicMap::new(parse("exp(z) - 1")?, parse("0.5*sin(z)")?),
    ];
    let poly = parse("z^2/2 + z")?;
    let (mut mobius, mut polynomial, mut analytic) = (0.0f64, 0.0f64, 0.0f64);
    for m in &maps {
        for _ in 0..20 {
            let phi = automorphism(rng)?;
            let z = phi.inverse().apply(disk_point(rng, 0.7));
            mobius = mobius.max(harmonic_composition_residual(m, &phi.to_expr(), z)?);
            polynomial = polynomial.max(harmonic_composition_residual(m, &poly, disk_point(rng, 0.3))?);
        }
    }
    for _ in 0..20 {
        let phi = automorphism(rng)?;
        let z = phi.inverse().apply(disk_point(rng, 0.7));
        analytic = analytic.max(composition_residual(&Expr::koebe(), &phi.to_expr(), z)?);
    }
    let (mut conformal, mut curvature) = (0.0f64, 0.0f64);
    for m in &maps {
        for _ in 0..10 {
            let z = disk_point(rng, 0.6);
            let s = lift(m, z)?;
            conformal = conformal.max(s.conformality_residual);
            curvature = curvature.max((s.curvature_density - sigma_laplacian(m, z)?.abs()).abs());
        }
    }
    Ok(vec![
        Check::at_most("analytic reduction", reduction, 0.0, 1e-10),
        Check::at_most("composition with automorphisms", mobius, 0.0, 1e-8),
        Check::at_most("composition with z²/2 + z", polynomial, 0.0, 1e-8),
        Check::at_most("analytic composition", analytic, 0.0, 1e-8),
        Check::at_most("pommerenke bound at 19204", pommerenke_bound(19204.0)?, 19407.0, 0.0),
        Check::at_most("lift conformality", conformal, 0.0, 1e-6),
        Check::at_most("curvature density vs Laplacian", curvature, 0.0, 1e-5),
        Check::near("criterion at 0 for the shear", lift_criterion_value(&maps[0], Complex64::new(0.0, 0.0))?, 8.0, 1e-9),
    ])
}

fn harnesses() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for c in [50.0, 200.0, 800.0] {
        let census = tan_zero_census(c)?;
        checks.push(Check::holds(format!("C={c}: census between envelopes"), census.lower_ok && census.upper_ok));
    }
    let f = Expr::tan_scaled(PI * PI / 2.0)?;
    let samples: Vec<Complex64> = (0..50).map(|j| Complex64::from_polar(0.9, j as f64 * 0.13)).collect();
    let rep = nehari_check(&f, NehariProfile::NehariConstant, &samples)?;
    checks.push(Check::near("nehari_constant equality", rep.worst_ratio, 1.0, 1e-12));
    Ok(checks)
}
