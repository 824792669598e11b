//! Schwarzian derivatives of analytic maps, Schwarzian norms and Nehari
//! profile checks.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Expr, Jet};
use crate::norm::{estimate_weighted_sup, GridSpec, NormEstimate};

/// Relative size below which `f'` counts as vanishing.
pub const CRITICAL_TOL: f64 = 1e-12;

/// Schwarzian from an order-3 jet: `6 c3/c1 - 6 (c2/c1)^2`.
pub fn schwarzian_from_jet(jet: &Jet) -> Result<Complex64> {
    let c = jet.coeffs();
    if c.len() < 4 {
        return Err(Error::OutOfRange { what: "jet order for a Schwarzian", value: jet.order() as f64 });
    }
    let scale = c.iter().fold(0.0f64, |m, x| m.max(x.norm()));
    if c[1].norm() <= CRITICAL_TOL * scale || c[1].norm() == 0.0 {
        return Err(Error::CriticalPoint { z: jet.base_point(), modulus: c[1].norm() });
    }
    let ratio = c[2] / c[1];
    Ok(6.0 * c[3] / c[1] - 6.0 * ratio * ratio)
}

/// `Sf(z) = f'''/f' - (3/2)(f''/f')^2`.
pub fn schwarzian(f: &Expr, z: Complex64) -> Result<Complex64> {
    schwarzian_from_jet(&f.eval_jet(z, 3)?)
}

/// `|S(f∘T)(z) - Sf(T(z)) T'(z)^2|`, which vanishes when `T` is Möbius.
pub fn composition_residual(f: &Expr, t: &Expr, z: Complex64) -> Result<f64> {
    let composed = Expr::compose(f.clone(), t.clone());
    let lhs = schwarzian(&composed, z)?;
    let tj = t.eval_jet(z, 1)?;
    let rhs = schwarzian(f, tj.value())? * tj.derivative(1).powi(2);
    Ok((lhs - rhs).norm())
}

/// Lower estimate of `‖Sf‖ = sup (1-|z|^2)^2 |Sf(z)|`.
pub fn schwarzian_norm_estimate(f: &Expr, grid: &GridSpec) -> Result<NormEstimate> {
    estimate_weighted_sup(|z| schwarzian(f, z), grid)
}

/// `6/r^2`: the norm bound for maps univalent on every pseudohyperbolic disk of radius `r`.
pub fn uniform_bound_from_radius(r: f64) -> Result<f64> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::OutOfRange { what: "pseudohyperbolic radius", value: r });
    }
    Ok(6.0 / (r * r))
}

/// Catalogued Nehari functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NehariProfile {
    /// `p(x) = (1-x^2)^-2`
    NehariQuadratic,
    /// `p(x) = π²/4`
    NehariConstant,
    /// `p(x) = 2/(1-x^2)`
    Pokornyi,
}

impl NehariProfile {
    pub const ALL: [NehariProfile; 3] =
        [NehariProfile::NehariQuadratic, NehariProfile::NehariConstant, NehariProfile::Pokornyi];

    pub fn p(self, x: f64) -> f64 {
        let w = 1.0 - x * x;
        match self {
            NehariProfile::NehariQuadratic => 1.0 / (w * w),
            NehariProfile::NehariConstant => std::f64::consts::PI.powi(2) / 4.0,
            NehariProfile::Pokornyi => 2.0 / w,
        }
    }

    /// `(1-x^2)^2 p(x)`, which stays bounded on `[0, 1)`.
    pub fn weighted(self, x: f64) -> f64 {
        let w = 1.0 - x * x;
        match self {
            NehariProfile::NehariQuadratic => 1.0,
            NehariProfile::NehariConstant => std::f64::consts::PI.powi(2) / 4.0 * w * w,
            NehariProfile::Pokornyi => 2.0 * w,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NehariProfile::NehariQuadratic => "nehari_quadratic",
            NehariProfile::NehariConstant => "nehari_constant",
            NehariProfile::Pokornyi => "pokornyi",
        }
    }
}

impl fmt::Display for NehariProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NehariProfile {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        NehariProfile::ALL
            .into_iter()
            .find(|p| p.name() == s.replace('-', "_"))
            .ok_or_else(|| format!("unknown profile `{s}` (expected nehari_quadratic, nehari_constant or pokornyi)"))
    }
}

/// Outcome of comparing `|Sf|` against `2p(|z|)` on a sample set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NehariReport {
    pub profile: NehariProfile,
    pub worst_ratio: f64,
    pub worst_point: Option<Complex64>,
    pub evaluated: usize,
    pub failures: Vec<(Complex64, String)>,
    pub pass: bool,
}

pub const NEHARI_SLACK: f64 = 1e-12;

pub fn nehari_check(f: &Expr, profile: NehariProfile, samples: &[Complex64]) -> Result<NehariReport> {
    let mut worst_ratio = 0.0f64;
    let mut worst_point = None;
    let mut failures = Vec::new();
    let mut evaluated = 0;
    for &z in samples {
        if z.norm() >= 1.0 {
            return Err(Error::OutsideDisk { z });
        }
        match schwarzian(f, z) {
            Ok(s) => {
                evaluated += 1;
                let ratio = s.norm() / (2.0 * profile.p(z.norm()));
                if worst_point.is_none() || ratio > worst_ratio {
                    worst_ratio = ratio;
                    worst_point = Some(z);
                }
            }
            Err(e) => failures.push((z, e.to_string())),
        }
    }
    let pass = failures.is_empty() && worst_ratio <= 1.0 + NEHARI_SLACK;
    Ok(NehariReport { profile, worst_ratio, worst_point, evaluated, failures, pass })
}
