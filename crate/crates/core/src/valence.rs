//! Valence bounds for bounded Schwarzians: the separation/packing bound for
//! `|Sf| ≤ C`, the annulus-and-rectangle bound for `|Sf| ≤ 4C/(1-|z|²)`, and
//! empirical preimage counts by the argument principle.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::{outer_radii_complements, rectangle_count};
use crate::quad::adaptive_simpson;

/// Relative slack when testing `C ≥ π²/2`, so that a decimal rendering of
/// π²/2 is accepted as the boundary case.
pub const BOUNDARY_SLACK: f64 = 1e-8;

fn nehari_constant_c() -> f64 {
    PI * PI / 2.0
}

/// `π√(2/C)`: minimal distance between preimages when `|Sf| ≤ C`.
pub fn separation_bound(c: f64) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::OutOfRange { what: "C (must be positive)", value: c });
    }
    Ok(PI * (2.0 / c).sqrt())
}

/// `(1 + √(2C)/π)²` together with its integer part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValenceBound {
    pub value: f64,
    pub cap: u64,
}

pub fn valence_bound_const(c: f64) -> Result<ValenceBound> {
    if !(c.is_finite() && c >= nehari_constant_c() * (1.0 - BOUNDARY_SLACK)) {
        return Err(Error::OutOfRange { what: "C (must be at least π²/2)", value: c });
    }
    let value = (1.0 + (2.0 * c).sqrt() / PI).powi(2);
    Ok(ValenceBound { value, cap: (value + BOUNDARY_SLACK).floor() as u64 })
}

/// Preimages of a target value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValenceReport {
    pub w: Complex64,
    pub radius: f64,
    /// Preimages counted with multiplicity.
    pub count: usize,
    pub preimages: Vec<Complex64>,
    pub multiplicities: Vec<usize>,
    pub poles: Vec<Complex64>,
    pub min_separation: Option<f64>,
    /// Argument-principle winding number, when computed.
    pub winding: Option<i64>,
    pub winding_residual: Option<f64>,
    pub nodes: Option<usize>,
}

fn min_pairwise(points: &[Complex64]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            let d = (a - b).norm();
            best = Some(best.map_or(d, |m| m.min(d)));
        }
    }
    best
}

/// Zeros of `tan(√(C/2) z)` on the open diameter `(-1, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TanCensus {
    pub report: ValenceReport,
    pub spacing: f64,
    pub lower_envelope: f64,
    pub bound: ValenceBound,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

pub fn tan_zero_census(c: f64) -> Result<TanCensus> {
    let bound = valence_bound_const(c)?;
    let spacing = separation_bound(c)?;
    let mut zeros = vec![0.0];
    for k in 1.. {
        let x = k as f64 * spacing;
        if x >= 1.0 - 1e-12 {
            break;
        }
        zeros.push(x);
        zeros.push(-x);
    }
    zeros.sort_by(f64::total_cmp);
    let points: Vec<Complex64> = zeros.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let min_separation = zeros.windows(2).map(|w| w[1] - w[0]).reduce(f64::min);
    let count = points.len();
    let lower_envelope = (2.0 * c).sqrt() / PI - 1.0;
    Ok(TanCensus {
        report: ValenceReport {
            w: Complex64::new(0.0, 0.0),
            radius: 1.0,
            count,
            multiplicities: vec![1; count],
            preimages: points,
            poles: Vec::new(),
            min_separation,
            winding: None,
            winding_residual: None,
            nodes: None,
        },
        spacing,
        lower_envelope,
        bound,
        lower_ok: count as f64 >= lower_envelope,
        upper_ok: count as u64 <= bound.cap,
    })
}

pub const DEFAULT_NODES: usize = 4096;
const MAX_NODES: usize = 1 << 22;
pub const WINDING_TOL: f64 = 0.01;
pub const NEAR_CONTOUR: f64 = 1e-6;
/// Preimages must satisfy `|f(z) - w|` below this, relative to `max(1, |w|)`.
pub const ROOT_TOL: f64 = 1e-8;

/// `(1/2πi)∮ f'/(f-w) dz` over `|z - center| = r` by the trapezoidal rule,
/// doubling the node count until the result is within `WINDING_TOL` of an
/// integer. A Newton distance `|f-w|/|f'|` below `NEAR_CONTOUR · r` at any
/// node means a root sits on the contour.
fn winding(f: &Expr, w: Complex64, center: Complex64, r: f64, nodes: usize) -> Result<(i64, f64, usize)> {
    let mut n = nodes.max(8);
    loop {
        let terms = (0..n)
            .into_par_iter()
            .map(|j| {
                let e = Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / n as f64);
                let z = center + e * r;
                let jet = f.eval_jet(z, 1)?;
                let diff = jet.value() - w;
                let d1 = jet.derivative(1);
                Ok((d1 * e * r / diff, diff.norm() / d1.norm()))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut nearest = f64::INFINITY;
        for (t, d) in terms {
            sum += t;
            nearest = nearest.min(d);
        }
        if nearest < NEAR_CONTOUR * r {
            return Err(Error::NearContourRoot { radius: r, distance: nearest });
        }
        let value = sum / n as f64;
        let rounded = value.re.round();
        let residual = (value - Complex64::new(rounded, 0.0)).norm();
        if residual.is_finite() && residual < WINDING_TOL {
            return Ok((rounded as i64, residual, n));
        }
        if n >= MAX_NODES || !residual.is_finite() {
            return Err(Error::WindingNotInteger { residual, nodes: n });
        }
        n *= 2;
    }
}

/// Newton iteration `z ← z - (f-w)/f'` from `z0`, or its reciprocal variant
/// `z ← z + (f-w)/f'` which converges to poles.
fn newton(f: &Expr, w: Complex64, z0: Complex64, toward_pole: bool, limit: f64) -> Option<Complex64> {
    let mut z = z0;
    for _ in 0..80 {
        let jet = match f.eval_jet(z, 1) {
            Ok(j) => j,
            Err(Error::Pole { .. }) if toward_pole => return Some(z),
            Err(_) => return None,
        };
        let d1 = jet.derivative(1);
        if d1.norm() == 0.0 || !d1.re.is_finite() {
            return None;
        }
        let step = (jet.value() - w) / d1;
        let z_new = if toward_pole { z + step } else { z - step };
        if !(z_new.norm() < limit) {
            return None;
        }
        if step.norm() <= 1e-15 * (1.0 + z.norm()) {
            return Some(z_new);
        }
        z = z_new;
    }
    Some(z)
}

fn dedupe(points: Vec<Complex64>, tol: f64) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::new();
    for p in points {
        if out.iter().all(|q| (p - q).norm() > tol) {
            out.push(p);
        }
    }
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    out
}

/// Count solutions of `f(z) = w` in `|z| < r` by the argument principle and
/// locate them by seeded Newton iteration. Poles inside the disk are located
/// too, and `Σ root multiplicities - Σ pole orders` must equal the winding number.
pub fn count_valence(f: &Expr, w: Complex64, r: f64, nodes: usize) -> Result<ValenceReport> {
    if !(r > 0.0 && r < 1.0 + 1e-12) {
        return Err(Error::OutOfRange { what: "contour radius", value: r });
    }
    let (wind, residual, used) = winding(f, w, Complex64::new(0.0, 0.0), r, nodes)?;

    let (nr, na) = (48, 96);
    let seeds: Vec<Complex64> = (0..nr)
        .flat_map(|i| {
            (0..na).map(move |j| {
                Complex64::from_polar(r * (i as f64 + 0.5) / nr as f64, std::f64::consts::TAU * j as f64 / na as f64)
            })
        })
        .collect();
    let tol = ROOT_TOL * w.norm().max(1.0);
    let roots: Vec<Complex64> = seeds
        .par_iter()
        .filter_map(|&z0| newton(f, w, z0, false, 2.0 * r))
        .filter(|z| z.norm() < r && f.eval(*z).is_ok_and(|v| (v - w).norm() < tol))
        .collect();
    let poles: Vec<Complex64> = seeds
        .par_iter()
        .filter_map(|&z0| newton(f, w, z0, true, 2.0 * r))
        .filter(|z| z.norm() < r && f.eval(*z).map_or(true, |v| (v - w).norm() > 1e10 * tol.max(1.0)))
        .collect();
    let roots = dedupe(roots, 1e-6);
    let poles = dedupe(poles, 1e-6);

    let mut all: Vec<Complex64> = roots.iter().chain(&poles).copied().collect();
    all.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let spacing = min_pairwise(&all).unwrap_or(1.0);
    let small = (spacing / 3.0).min(1e-2).min((r - all.iter().fold(0.0f64, |m, z| m.max(z.norm()))) / 2.0);
    let order = |z: Complex64| -> Result<i64> {
        let (k, ..) = winding(f, w, z, small, 256)?;
        Ok(k)
    };
    let mut multiplicities = Vec::with_capacity(roots.len());
    for &z in &roots {
        let k = order(z)?;
        multiplicities.push(k.max(1) as usize);
    }
    let mut pole_total = 0i64;
    for &z in &poles {
        pole_total += (-order(z)?).max(1);
    }
    let count: usize = multiplicities.iter().sum();
    if count as i64 - pole_total != wind {
        return Err(Error::CountMismatch { winding: wind, roots: count, poles: pole_total as usize });
    }
    Ok(ValenceReport {
        w,
        radius: r,
        count,
        min_separation: min_pairwise(&roots),
        preimages: roots,
        multiplicities,
        poles,
        winding: Some(wind),
        winding_residual: Some(residual),
        nodes: Some(used),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PackingCheck {
    pub pass: bool,
    pub separation_ok: bool,
    pub count_ok: bool,
    pub separation_bound: f64,
    pub valence_bound: f64,
}

/// Preimages are `π√(2/C)`-separated and at most `(1+√(2C)/π)²` in number.
pub fn packing_check(report: &ValenceReport, c: f64) -> Result<PackingCheck> {
    let sep = separation_bound(c)?;
    let bound = valence_bound_const(c)?;
    let separation_ok = report.min_separation.is_none_or(|d| d >= sep - 1e-9);
    let count_ok = report.count as u64 <= bound.cap;
    Ok(PackingCheck {
        pass: separation_ok && count_ok,
        separation_ok,
        count_ok,
        separation_bound: sep,
        valence_bound: bound.value,
    })
}

/// `floor(2π/d)`: points in an annulus of width `d` that are `2d` apart.
pub fn lemma2_bound(d: f64) -> Result<u64> {
    if !(d > 0.0 && d <= 1.0) {
        return Err(Error::OutOfRange { what: "annulus width d (0 < d ≤ 1)", value: d });
    }
    Ok((2.0 * PI / d).floor() as u64)
}

fn check_step_args(a: f64, eps: f64) -> Result<()> {
    if !(0.0..1.0).contains(&a) {
        return Err(Error::OutOfRange { what: "radius a (0 ≤ a < 1)", value: a });
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::OutOfRange { what: "ε", value: eps });
    }
    Ok(())
}

/// Solve `x - a = ε√(1-x²)` for `x > a`: returns `(x, x - a)`.
pub fn next_radius(a: f64, eps: f64) -> Result<(f64, f64)> {
    check_step_args(a, eps)?;
    let root = (1.0 - a * a + eps * eps).sqrt();
    let x = (a + eps * root) / (1.0 + eps * eps);
    // x - a computed without cancellation: ε(root - εa)/(1+ε²)
    let d = eps * (root - eps * a) / (1.0 + eps * eps);
    Ok((x, d))
}

/// `φ(a) = (√(1-a²+ε²) + εa)/(ε(1-a²))`, the reciprocal of the step from `a`.
pub fn phi_step(a: f64, eps: f64) -> Result<f64> {
    check_step_args(a, eps)?;
    Ok(((1.0 - a * a + eps * eps).sqrt() + eps * a) / (eps * (1.0 - a * a)))
}

/// Everything that enters the annulus-and-rectangle valence bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundBreakdown {
    pub c: f64,
    pub eps: f64,
    pub r0: f64,
    /// `r_0, r_1, …, r_m`, all at most `R`.
    pub radii: Vec<f64>,
    /// `d_k = r_k - r_{k-1}` for `k = 1..=m`.
    pub gaps: Vec<f64>,
    pub m: usize,
    pub r: f64,
    pub r1: f64,
    pub inner_unit: u64,
    pub per_annulus_counts: Vec<u64>,
    pub inner_sum: u64,
    pub gap_annulus_count: u64,
    pub rectangle_count: u64,
    pub rectangle_fallback: bool,
    pub total: u64,
    /// `max_k |φ(r_{k-1}) d_k - 1|`.
    pub phi_d_residual: f64,
    /// `1 + 2π ∫₀^R φ²`.
    pub quadrature_envelope: f64,
    pub total_over_c_log_c: f64,
}

pub const C_MIN_SUPPORTED: f64 = 2.1;
pub const C_MAX_SUPPORTED: f64 = 1e6;
const STAGNATION_GAP: f64 = 1e-12;

pub fn epsilon(c: f64) -> f64 {
    PI / (2.0 * c.sqrt())
}

pub fn theorem2_breakdown(c: f64) -> Result<BoundBreakdown> {
    if !(c > 2.0 && c <= C_MAX_SUPPORTED) {
        return Err(Error::OutOfRange { what: "C (2 < C ≤ 1e6)", value: c });
    }
    let eps = epsilon(c);
    let (one_minus_r2, one_minus_r12) = outer_radii_complements(c);
    let r = (1.0 - one_minus_r2).sqrt();
    let r1 = (1.0 - one_minus_r12).sqrt();
    let (r0, _) = next_radius(0.0, eps)?;

    let mut radii = vec![r0];
    let mut gaps = Vec::new();
    let mut per_annulus_counts = Vec::new();
    let mut phi_d_residual = 0.0f64;
    loop {
        let a = *radii.last().unwrap();
        let (x, d) = next_radius(a, eps)?;
        if d < STAGNATION_GAP {
            return Err(Error::Stagnation { step: radii.len(), gap: d });
        }
        if x > r {
            break;
        }
        phi_d_residual = phi_d_residual.max((phi_step(a, eps)? * d - 1.0).abs());
        per_annulus_counts.push(lemma2_bound(d)?);
        radii.push(x);
        gaps.push(d);
    }
    let m = radii.len() - 1;
    let inner_sum: u64 = per_annulus_counts.iter().sum();

    // 2√(2C p(R)) with p(R) = 2/(1-R²) = 8C; the relative slack absorbs
    // rounding when the product is an integer.
    let gap_annulus_count = if radii[m] < r {
        let p_r = 2.0 / one_minus_r2;
        let v = 2.0 * (2.0 * c * p_r).sqrt();
        (v * (1.0 - 1e-12)).ceil() as u64
    } else {
        0
    };
    let rect = rectangle_count(c)?;
    let inner_unit = 1;
    let total = inner_unit + inner_sum + gap_annulus_count + rect.count;
    let integral = adaptive_simpson(|x| phi_step(x, eps).unwrap_or(f64::NAN).powi(2), 0.0, r, 1e-10)?;
    Ok(BoundBreakdown {
        c,
        eps,
        r0,
        radii,
        gaps,
        m,
        r,
        r1,
        inner_unit,
        per_annulus_counts,
        inner_sum,
        gap_annulus_count,
        rectangle_count: rect.count,
        rectangle_fallback: rect.fallback,
        total,
        phi_d_residual,
        quadrature_envelope: 1.0 + 2.0 * PI * integral,
        total_over_c_log_c: total as f64 / (c * c.ln()),
    })
}

/// The three pieces of `∫₀^R φ²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralEstimates {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    /// `(2C/π²) log(16C)`.
    pub i1_bound: f64,
    /// `2/(1-R²)`.
    pub i2_bound: f64,
    pub i1_ok: bool,
    pub i2_ok: bool,
    pub i3_finite: bool,
}

/// Simpson over `[0, R]` split at `R - (1-R)/2`, where the integrands start
/// to grow like `(1-x²)^-2`.
fn split_simpson<F: Fn(f64) -> f64>(f: F, r: f64) -> Result<f64> {
    let split = r - (1.0 - r) / 2.0;
    Ok(adaptive_simpson(&f, 0.0, split, 1e-8)? + adaptive_simpson(&f, split, r, 1e-8)?)
}

pub fn integral_estimates(c: f64) -> Result<IntegralEstimates> {
    if !(c > 2.0 && c.is_finite()) {
        return Err(Error::OutOfRange { what: "C (must exceed 2)", value: c });
    }
    let eps = epsilon(c);
    let (one_minus_r2, _) = outer_radii_complements(c);
    let r = (1.0 - one_minus_r2).sqrt();
    let i1 = split_simpson(|x| 1.0 / (eps * eps * (1.0 - x * x)), r)?;
    let i2 = split_simpson(|x| (1.0 + x * x) / (1.0 - x * x).powi(2), r)?;
    let i3 = split_simpson(|x| 2.0 / eps * x * (1.0 + eps * eps - x * x).sqrt() / (1.0 - x * x).powi(2), r)?;
    let i1_bound = 2.0 * c / (PI * PI) * (16.0 * c).ln();
    let i2_bound = 2.0 / one_minus_r2;
    Ok(IntegralEstimates {
        i1,
        i2,
        i3,
        i1_bound,
        i2_bound,
        i1_ok: i1 <= i1_bound + 1e-6,
        i2_ok: i2 <= i2_bound,
        i3_finite: i3.is_finite(),
    })
}

/// One row of a breakdown sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub c: f64,
    pub r0: f64,
    pub m: usize,
    pub r: f64,
    pub r1: f64,
    pub inner_sum: u64,
    pub gap_count: u64,
    pub rect_count: u64,
    pub total: u64,
    pub total_over_c_log_c: f64,
}

impl From<&BoundBreakdown> for SweepRow {
    fn from(b: &BoundBreakdown) -> Self {
        SweepRow {
            c: b.c,
            r0: b.r0,
            m: b.m,
            r: b.r,
            r1: b.r1,
            inner_sum: b.inner_sum,
            gap_count: b.gap_annulus_count,
            rect_count: b.rectangle_count,
            total: b.total,
            total_over_c_log_c: b.total_over_c_log_c,
        }
    }
}

/// Breakdowns for every `C`, computed in parallel and returned sorted by `C`.
pub fn sweep(cs: &[f64]) -> Result<Vec<SweepRow>> {
    let mut rows = cs
        .par_iter()
        .map(|&c| theorem2_breakdown(c).map(|b| SweepRow::from(&b)))
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.c.total_cmp(&b.c));
    Ok(rows)
}

pub const SWEEP_HEADER: &str = "C,r0,m,R,R1,inner_sum,gap_count,rect_count,total,total_over_ClogC";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.c, r.r0, r.m, r.r, r.r1, r.inner_sum, r.gap_count, r.rect_count, r.total, r.total_over_c_log_c
        );
    }
    out
}

/// Range of `total/(C ln C)` over a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalBand {
    pub min: f64,
    pub max: f64,
    /// The largest ratio: an empirical constant `A` for the sweep.
    pub a_empirical: f64,
    pub nonincreasing: bool,
    pub all_finite_positive: bool,
}

pub fn empirical_band(rows: &[SweepRow]) -> EmpiricalBand {
    let ratios: Vec<f64> = rows.iter().map(|r| r.total_over_c_log_c).collect();
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    EmpiricalBand {
        min,
        max,
        a_empirical: max,
        nonincreasing: ratios.windows(2).all(|w| w[1] <= w[0]),
        all_finite_positive: ratios.iter().all(|x| x.is_finite() && *x > 0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn separation_and_constant_bound() {
        assert!((separation_bound(PI * PI / 2.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((separation_bound(2.0 * PI * PI).unwrap() - 1.0).abs() < 1e-15);
        assert!((separation_bound(200.0).unwrap() - 0.1 * PI).abs() < 1e-15);
        assert!(separation_bound(0.0).is_err());

        let b = valence_bound_const(PI * PI / 2.0).unwrap();
        assert_eq!(b.cap, 4);
        assert!((b.value - 4.0).abs() < 1e-14);
        assert_eq!(valence_bound_const(4.9348022).unwrap().cap, 4);
        assert_eq!(valence_bound_const(2.0 * PI * PI).unwrap().cap, 9);
        assert_eq!(valence_bound_const(50.0 * PI * PI).unwrap().cap, 121);
        assert!(valence_bound_const(4.9).is_err());
    }

    #[test]
    fn tan_census_examples() {
        let t = tan_zero_census(200.0).unwrap();
        assert_eq!(t.report.count, 7);
        assert!((t.report.min_separation.unwrap() - 0.1 * PI).abs() < 1e-12);
        assert!(t.lower_ok && t.upper_ok);
        assert_eq!(tan_zero_census(2.0 * PI * PI).unwrap().report.count, 1);
        assert_eq!(tan_zero_census(PI * PI / 2.0 * (1.0 + 1e-6)).unwrap().report.count, 1);
    }

    #[test]
    fn contour_counts() {
        let r = count_valence(&Expr::koebe(), c(1.0, 0.0), 0.9, DEFAULT_NODES).unwrap();
        assert_eq!(r.count, 1);
        // z/(1-z)^2 = 1 ⇔ z² - 3z + 1 = 0, root (3-√5)/2 inside the disk
        assert!((r.preimages[0] - c((3.0 - 5f64.sqrt()) / 2.0, 0.0)).norm() < 1e-12);

        let r = count_valence(&Expr::tan_scaled(200.0).unwrap(), c(0.0, 0.0), 0.999, DEFAULT_NODES).unwrap();
        assert_eq!(r.count, 7);
        assert_eq!(r.poles.len(), 6);
        assert_eq!(r.winding, Some(1));
        assert!(r.winding_residual.unwrap() < WINDING_TOL);
        assert!((r.min_separation.unwrap() - 0.1 * PI).abs() < 1e-10);

        let r = count_valence(&Expr::identity(), c(2.0, 0.0), 0.9, DEFAULT_NODES).unwrap();
        assert_eq!(r.count, 0);
    }

    #[test]
    fn near_contour_root_is_rejected() {
        let e = count_valence(&Expr::identity(), c(0.5, 0.0), 0.5 + 1e-8, DEFAULT_NODES);
        assert!(matches!(e, Err(Error::NearContourRoot { .. })), "{e:?}");
    }

    #[test]
    fn multiple_roots_carry_multiplicity() {
        let f = crate::expr::parse("(z-0.2)^2*(z+0.5)").unwrap();
        let r = count_valence(&f, c(0.0, 0.0), 0.9, DEFAULT_NODES).unwrap();
        assert_eq!(r.count, 3);
        assert_eq!(r.winding, Some(3));
    }

    #[test]
    fn packing_examples() {
        let t = tan_zero_census(200.0).unwrap();
        assert!(packing_check(&t.report, 200.0).unwrap().pass);
        let mut fake = t.report.clone();
        fake.count = 100;
        assert!(!packing_check(&fake, 200.0).unwrap().pass);
        let mut single = t.report.clone();
        single.count = 1;
        single.min_separation = None;
        assert!(packing_check(&single, 200.0).unwrap().pass);
    }

    #[test]
    fn lemma2_examples() {
        assert_eq!(lemma2_bound(0.5).unwrap(), 12);
        assert_eq!(lemma2_bound(1.0).unwrap(), 6);
        assert!(lemma2_bound(PI).is_err());
    }

    #[test]
    fn step_examples() {
        let (x, d) = next_radius(0.0, 0.5).unwrap();
        assert!((x - 1.0 / 5f64.sqrt()).abs() < 1e-15);
        assert!((d - x).abs() < 1e-16);
        let (x, _) = next_radius(0.3, 1e-12).unwrap();
        assert!((x - 0.3).abs() < 1e-11);
        let (x, d) = next_radius(0.8, 0.1).unwrap();
        assert!((x - 0.8 - 0.1 * (1.0 - x * x).sqrt()).abs() < 1e-12);
        assert!((d - (x - 0.8)).abs() < 1e-15);
        assert!(next_radius(1.0, 0.1).is_err());

        assert!((phi_step(0.0, 1.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((phi_step(0.0, 0.5).unwrap() - 1.25f64.sqrt() / 0.5).abs() < 1e-15);
        let p = |a| phi_step(a, 0.1).unwrap();
        assert!(p(0.2) < p(0.5) && p(0.5) < p(0.8));
        assert!((p(0.8) * next_radius(0.8, 0.1).unwrap().1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn breakdown_at_four() {
        let b = theorem2_breakdown(4.0).unwrap();
        assert!((b.r0 - PI / (PI * PI + 16.0).sqrt()).abs() < 1e-15);
        assert!((b.r * b.r - (1.0 - 1.0 / 16.0)).abs() < 1e-15);
        assert!((b.r1 * b.r1 - (1.0 - 1.0 / 8.0)).abs() < 1e-15);
        assert_eq!(b.m, 1);
        assert_eq!(b.inner_sum, 20);
        assert_eq!(b.gap_annulus_count, 32);
        assert_eq!(b.rectangle_count, 63);
        assert_eq!(b.total, 1 + 20 + 32 + 63);
        assert!(b.phi_d_residual < 1e-10);
        assert!((b.inner_sum as f64) <= 1.01 * (b.quadrature_envelope - 1.0));
        assert!(theorem2_breakdown(2.0).is_err());
    }

    #[test]
    fn integrals_have_closed_forms() {
        for cc in [4.0, 64.0, 1024.0] {
            let est = integral_estimates(cc).unwrap();
            let eps = epsilon(cc);
            let r = (1.0 - 0.25 / cc).sqrt();
            assert!((est.i1 - r.atanh() / (eps * eps)).abs() < 1e-7 * est.i1);
            assert!((est.i2 - r / (0.25 / cc)).abs() < 1e-7 * est.i2);
            // u = 1-x²: ∫ x√(ε²+u)/u² dx = -½∫√(ε²+u)/u² du
            let big_f = |u: f64| {
                let s = (eps * eps + u).sqrt();
                -s / u + (1.0 / (2.0 * eps)) * ((s - eps) / (s + eps)).ln()
            };
            let i3 = (2.0 / eps) * (-0.5) * (big_f(0.25 / cc) - big_f(1.0));
            assert!((est.i3 - i3).abs() < 1e-7 * i3, "{} vs {i3}", est.i3);
            assert!(est.i1_ok && est.i2_ok && est.i3_finite);
            let b = theorem2_breakdown(cc).unwrap();
            let sum = 1.0 + 2.0 * PI * (est.i1 + est.i2 + est.i3);
            assert!((sum - b.quadrature_envelope).abs() < 1e-6 * sum);
        }
    }

    #[test]
    fn csv_layout() {
        let rows = sweep(&[16.0, 4.0]).unwrap();
        assert_eq!(rows[0].c, 4.0);
        let csv = sweep_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(SWEEP_HEADER));
        assert!(lines.next().unwrap().starts_with("4,"));
        assert_eq!(csv.lines().count(), 3);
    }
}
