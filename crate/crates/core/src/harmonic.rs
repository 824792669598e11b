//! Harmonic maps `f = h + ḡ` with dilatation `ω = g'/h' = q²`, their
//! Schwarzian `2(σ_zz - σ_z²)` where `σ = log(|h'|(1+|q|²))`, shears of the
//! Koebe function, convexity quantities and the minimal-surface lift.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Expr, Jet};
use crate::norm::{estimate_weighted_sup, GridSpec, NormEstimate};
use crate::quad::segment_integral;
use crate::schwarzian::{schwarzian, CRITICAL_TOL};
use crate::valence::{separation_bound, ValenceReport};

const PATH_REL_TOL: f64 = 1e-13;
const PATH_ABS_TOL: f64 = 1e-15;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `f = h + ḡ` with `g' = q² h'` and `g(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicMap {
    pub h: Expr,
    pub q: Expr,
}

/// `σ` and its first two Wirtinger `z`-derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaJet {
    pub sigma: f64,
    pub sigma_z: Complex64,
    pub sigma_zz: Complex64,
}

impl HarmonicMap {
    pub fn new(h: Expr, q: Expr) -> Self {
        HarmonicMap { h, q }
    }

    /// The analytic map `h` viewed as a harmonic map with `q ≡ 0`.
    pub fn analytic(h: Expr) -> Self {
        HarmonicMap { h, q: Expr::real(0.0) }
    }

    /// `f∘φ = h∘φ + conj(g∘φ)`, whose dilatation root is `q∘φ`.
    pub fn compose(&self, phi: &Expr) -> HarmonicMap {
        HarmonicMap {
            h: Expr::compose(self.h.clone(), phi.clone()),
            q: Expr::compose(self.q.clone(), phi.clone()),
        }
    }

    fn jets(&self, z: Complex64) -> Result<(Jet, Jet)> {
        let hj = self.h.eval_jet(z, 3)?;
        let c = hj.coeffs();
        let scale = c.iter().fold(0.0f64, |m, x| m.max(x.norm()));
        if c[1].norm() <= CRITICAL_TOL * scale || c[1].norm() == 0.0 {
            return Err(Error::CriticalPoint { z, modulus: c[1].norm() });
        }
        let qj = self.q.eval_jet(z, 2)?;
        let modulus = qj.value().norm();
        if modulus >= 1.0 {
            return Err(Error::NotOrientationPreserving { z, modulus });
        }
        Ok((hj, qj))
    }

    pub fn sigma_jet(&self, z: Complex64) -> Result<SigmaJet> {
        let (hj, qj) = self.jets(z)?;
        let (h1, h2, h3) = (hj.derivative(1), hj.derivative(2), hj.derivative(3));
        let (q, q1, q2) = (qj.value(), qj.derivative(1), qj.derivative(2));
        let lam = 1.0 + q.norm_sqr();
        let qb = q.conj();
        Ok(SigmaJet {
            sigma: (h1.norm() * lam).ln(),
            sigma_z: h2 / (2.0 * h1) + qb * q1 / lam,
            sigma_zz: (h3 * h1 - h2 * h2) / (2.0 * h1 * h1) + qb * q2 / lam - qb * qb * q1 * q1 / (lam * lam),
        })
    }

    /// `g'(z) = q(z)² h'(z)`.
    pub fn g_prime(&self, z: Complex64) -> Result<Complex64> {
        let h1 = self.h.eval_jet(z, 1)?.derivative(1);
        let q = self.q.eval(z)?;
        Ok(q * q * h1)
    }

    fn qh_prime(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.q.eval(z)? * self.h.eval_jet(z, 1)?.derivative(1))
    }

    /// `g(z) = ∫₀^z q² h'` along the radius.
    pub fn g(&self, z: Complex64) -> Result<Complex64> {
        segment_integral(|t| self.g_prime(t), c(0.0, 0.0), z, PATH_REL_TOL, PATH_ABS_TOL)
    }

    pub fn f(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.h.eval(z)? + self.g(z)?.conj())
    }

    /// `|h'| + |g'| = |h'|(1 + |q|²)`.
    pub fn conformal_factor(&self, z: Complex64) -> Result<f64> {
        let h1 = self.h.eval_jet(z, 1)?.derivative(1);
        Ok(h1.norm() * (1.0 + self.q.eval(z)?.norm_sqr()))
    }

    /// `e^{2σ}|K| = 4|q'|²/(1+|q|²)²` for the lifted minimal surface.
    pub fn curvature_density(&self, z: Complex64) -> Result<f64> {
        let qj = self.q.eval_jet(z, 1)?;
        let lam = 1.0 + qj.value().norm_sqr();
        Ok(4.0 * qj.derivative(1).norm_sqr() / (lam * lam))
    }
}

/// `Sf = 2(σ_zz - σ_z²)`.
pub fn harmonic_schwarzian(map: &HarmonicMap, z: Complex64) -> Result<Complex64> {
    let s = map.sigma_jet(z)?;
    Ok(2.0 * (s.sigma_zz - s.sigma_z * s.sigma_z))
}

/// `|S(f∘φ) - (Sf∘φ)φ'² - Sφ|` at `z`.
pub fn harmonic_composition_residual(map: &HarmonicMap, phi: &Expr, z: Complex64) -> Result<f64> {
    let lhs = harmonic_schwarzian(&map.compose(phi), z)?;
    let pj = phi.eval_jet(z, 1)?;
    let rhs = harmonic_schwarzian(map, pj.value())? * pj.derivative(1).powi(2) + schwarzian(phi, z)?;
    Ok((lhs - rhs).norm())
}

/// Shear of the Koebe function with dilatation `e^{iθ}z²`: `h - g = k`,
/// `q = e^{iθ/2} z` and `h' = k'/(1 - e^{iθ}z²)`.
pub fn shear_koebe(theta: f64) -> Result<HarmonicMap> {
    let h = Expr::koebe_shear(theta)?;
    let q = Expr::constant(Complex64::from_polar(1.0, theta / 2.0)) * Expr::Var;
    Ok(HarmonicMap { h, q })
}

/// `-4(1/(1-z) + z̄/(1+|z|²))²`, the Schwarzian of the unrotated shear.
pub fn shear_koebe_schwarzian_closed_form(z: Complex64) -> Complex64 {
    let t = 1.0 / (1.0 - z) + z.conj() / (1.0 + z.norm_sqr());
    -4.0 * t * t
}

pub fn harmonic_norm_estimate(map: &HarmonicMap, grid: &GridSpec) -> Result<NormEstimate> {
    estimate_weighted_sup(|z| harmonic_schwarzian(map, z), grid)
}

/// `‖Sh‖ + 2(1 + ½‖Sh‖)^{1/2} + 7`.
pub fn pommerenke_bound(norm_h: f64) -> Result<f64> {
    if !(norm_h >= 0.0 && norm_h.is_finite()) {
        return Err(Error::OutOfRange { what: "‖Sh‖ (must be nonnegative)", value: norm_h });
    }
    Ok(norm_h + 2.0 * (1.0 + 0.5 * norm_h).sqrt() + 7.0)
}

fn first_two(h: &Expr, z: Complex64) -> Result<(Complex64, Complex64)> {
    let j = h.eval_jet(z, 2)?;
    let c = j.coeffs();
    let scale = c.iter().fold(0.0f64, |m, x| m.max(x.norm()));
    if c[1].norm() <= CRITICAL_TOL * scale || c[1].norm() == 0.0 {
        return Err(Error::CriticalPoint { z, modulus: c[1].norm() });
    }
    Ok((j.derivative(1), j.derivative(2)))
}

/// `Re(1 + z h''/h')`.
pub fn convexity_indicator(h: &Expr, z: Complex64) -> Result<f64> {
    let (h1, h2) = first_two(h, z)?;
    Ok((1.0 + z * h2 / h1).re)
}

/// `(1 - 2λρ + ρ²)/(1 - ρ²)`.
pub fn convexity_floor(rho: f64, lambda: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::OutOfRange { what: "ρ (0 ≤ ρ < 1)", value: rho });
    }
    if !(lambda >= 1.0 && lambda.is_finite()) {
        return Err(Error::OutOfRange { what: "λ (must be at least 1)", value: lambda });
    }
    Ok((1.0 - 2.0 * lambda * rho + rho * rho) / (1.0 - rho * rho))
}

pub const DEFAULT_LAMBDA: f64 = 49.0;

/// `μ = λ - √(λ² - 1)`, the smaller root of `1 - 2λρ + ρ²`.
pub fn mu(lambda: f64) -> Result<f64> {
    if !(lambda >= 1.0 && lambda.is_finite()) {
        return Err(Error::OutOfRange { what: "λ (must be at least 1)", value: lambda });
    }
    Ok(1.0 / (lambda + (lambda * lambda - 1.0).sqrt()))
}

/// `H''(0) = (1-|ζ|²) h''(ζ)/h'(ζ) - 2ζ̄`.
pub fn schwarz_transform_coefficient(h: &Expr, zeta: Complex64) -> Result<Complex64> {
    let (h1, h2) = first_two(h, zeta)?;
    Ok((1.0 - zeta.norm_sqr()) * h2 / h1 - 2.0 * zeta.conj())
}

/// A point of the minimal surface over `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiftSample {
    pub z: Complex64,
    pub coords: [f64; 3],
    /// `e^σ = |h'| + |g'|`.
    pub conformal_factor: f64,
    /// `e^{2σ}|K|`.
    pub curvature_density: f64,
    /// Largest relative defect of `|∂x f̃| = |∂y f̃| = e^σ`, `∂x f̃ · ∂y f̃ = 0`
    /// from five-point numerical partials.
    pub conformality_residual: f64,
}

pub const CONFORMALITY_TOL: f64 = 1e-6;
const LIFT_STEP: f64 = 1e-3;

impl LiftSample {
    pub fn is_conformal(&self) -> bool {
        self.conformality_residual <= CONFORMALITY_TOL
    }
}

/// `f̃ = (Re f, Im f, 2 Im ∫₀^z q h')`.
pub fn lift(map: &HarmonicMap, z: Complex64) -> Result<LiftSample> {
    if z.norm() >= 1.0 {
        return Err(Error::OutsideDisk { z });
    }
    let origin = c(0.0, 0.0);
    let g0 = segment_integral(|t| map.g_prime(t), origin, z, PATH_REL_TOL, PATH_ABS_TOL)?;
    let x30 = segment_integral(|t| map.qh_prime(t), origin, z, PATH_REL_TOL, PATH_ABS_TOL)?;
    let coords_at = |p: Complex64| -> Result<[f64; 3]> {
        let g = g0 + segment_integral(|t| map.g_prime(t), z, p, PATH_REL_TOL, PATH_ABS_TOL)?;
        let x3 = x30 + segment_integral(|t| map.qh_prime(t), z, p, PATH_REL_TOL, PATH_ABS_TOL)?;
        let f = map.h.eval(p)? + g.conj();
        Ok([f.re, f.im, 2.0 * x3.im])
    };
    let coords = coords_at(z)?;
    let factor = map.conformal_factor(z)?;

    let partial = |dir: Complex64| -> Result<[f64; 3]> {
        let h = LIFT_STEP;
        let p2 = coords_at(z + dir * (2.0 * h))?;
        let p1 = coords_at(z + dir * h)?;
        let m1 = coords_at(z - dir * h)?;
        let m2 = coords_at(z - dir * (2.0 * h))?;
        Ok(std::array::from_fn(|k| (-p2[k] + 8.0 * p1[k] - 8.0 * m1[k] + m2[k]) / (12.0 * h)))
    };
    let dx = partial(c(1.0, 0.0))?;
    let dy = partial(c(0.0, 1.0))?;
    let norm = |v: [f64; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let dot = dx[0] * dy[0] + dx[1] * dy[1] + dx[2] * dy[2];
    let residual = [(norm(dx) - factor).abs(), (norm(dy) - factor).abs(), dot.abs() / factor]
        .into_iter()
        .fold(0.0f64, f64::max)
        / factor;
    Ok(LiftSample {
        z,
        coords,
        conformal_factor: factor,
        curvature_density: map.curvature_density(z)?,
        conformality_residual: residual,
    })
}

/// `|Sf(z)| + e^{2σ}|K|`.
pub fn lift_criterion_value(map: &HarmonicMap, z: Complex64) -> Result<f64> {
    Ok(harmonic_schwarzian(map, z)?.norm() + map.curvature_density(z)?)
}

/// Seeds for the preimage search: a polar grid inside `|z| < radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PreimageGrid {
    pub radial: usize,
    pub angular: usize,
    pub radius: f64,
}

impl Default for PreimageGrid {
    fn default() -> Self {
        PreimageGrid { radial: 24, angular: 48, radius: 0.99 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicValenceReport {
    pub report: ValenceReport,
    /// Seeds whose Newton iteration left the disk or stalled.
    pub dropped: usize,
    /// `Some(min_separation ≥ π√(2/C))` when a criterion bound `C` was supplied.
    pub separation_ok: Option<bool>,
    pub separation_bound: Option<f64>,
}

/// Newton's method for `h(z) + conj(g(z)) = w` with `g` carried along the
/// iterates by short path integrals.
fn planar_newton(map: &HarmonicMap, w: Complex64, z0: Complex64, radius: f64) -> Option<Complex64> {
    let tol = 1e-13 * w.norm().max(1.0);
    let mut z = z0;
    let mut g = map.g(z).ok()?;
    for _ in 0..60 {
        let f = map.h.eval(z).ok()? + g.conj();
        let r = w - f;
        if r.norm() < tol {
            return Some(z);
        }
        let h1 = map.h.eval_jet(z, 1).ok()?.derivative(1);
        let g1 = map.g_prime(z).ok()?;
        let det = h1.norm_sqr() - g1.norm_sqr();
        if det <= 0.0 {
            return None;
        }
        let mut step = (h1.conj() * r - g1.conj() * r.conj()) / det;
        // keep steps inside the disk
        let max_step = 0.5 * (radius - z.norm()).max(1e-3);
        if step.norm() > max_step {
            step *= max_step / step.norm();
        }
        let z_new = z + step;
        if z_new.norm() >= radius {
            return None;
        }
        g += segment_integral(|t| map.g_prime(t), z, z_new, PATH_REL_TOL, PATH_ABS_TOL).ok()?;
        z = z_new;
    }
    let f = map.h.eval(z).ok()? + g.conj();
    ((w - f).norm() < 1e3 * tol).then_some(z)
}

pub fn harmonic_preimages(
    map: &HarmonicMap,
    w: Complex64,
    grid: &PreimageGrid,
    criterion_c: Option<f64>,
) -> Result<HarmonicValenceReport> {
    if !(grid.radius > 0.0 && grid.radius < 1.0) || grid.radial == 0 || grid.angular == 0 {
        return Err(Error::OutOfRange { what: "preimage grid", value: grid.radius });
    }
    let seeds: Vec<Complex64> = (0..grid.radial)
        .flat_map(|i| {
            (0..grid.angular).map(move |j| {
                Complex64::from_polar(
                    grid.radius * (i as f64 + 0.5) / grid.radial as f64,
                    std::f64::consts::TAU * j as f64 / grid.angular as f64,
                )
            })
        })
        .collect();
    let results: Vec<Option<Complex64>> = seeds.par_iter().map(|&z0| planar_newton(map, w, z0, grid.radius)).collect();
    let dropped = results.iter().filter(|r| r.is_none()).count();
    let mut found: Vec<Complex64> = Vec::new();
    for z in results.into_iter().flatten() {
        if found.iter().all(|p| (p - z).norm() > 1e-6) {
            found.push(z);
        }
    }
    found.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut min_separation: Option<f64> = None;
    for (i, a) in found.iter().enumerate() {
        for b in &found[i + 1..] {
            let d = (a - b).norm();
            min_separation = Some(min_separation.map_or(d, |m| m.min(d)));
        }
    }
    let separation_bound = criterion_c.map(separation_bound).transpose()?;
    let separation_ok = separation_bound.map(|b| min_separation.is_none_or(|d| d >= b - 1e-9));
    Ok(HarmonicValenceReport {
        report: ValenceReport {
            w,
            radius: grid.radius,
            count: found.len(),
            multiplicities: vec![1; found.len()],
            preimages: found,
            poles: Vec::new(),
            min_separation,
            winding: None,
            winding_residual: None,
            nodes: None,
        },
        dropped,
        separation_ok,
        separation_bound,
    })
}
