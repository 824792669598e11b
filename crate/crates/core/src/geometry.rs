//! Pseudohyperbolic geometry of the unit disk and the curvilinear rectangle
//! covering of the outer annulus.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expr;

fn check_inside(z: Complex64) -> Result<()> {
    if z.norm() < 1.0 && z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::OutsideDisk { z })
    }
}

/// Pseudohyperbolic distance `|(α-β)/(1-ᾱβ)|`.
pub fn rho(alpha: Complex64, beta: Complex64) -> Result<f64> {
    check_inside(alpha)?;
    check_inside(beta)?;
    Ok(((alpha - beta) / (1.0 - alpha.conj() * beta)).norm())
}

/// Hyperbolic distance `½ log((1+ρ)/(1-ρ))`.
pub fn hyp_dist(alpha: Complex64, beta: Complex64) -> Result<f64> {
    Ok(rho(alpha, beta)?.atanh())
}

/// Disk automorphism `z ↦ e^{iθ}(z+a)/(1+āz)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MobiusSelfMap {
    pub a: Complex64,
    pub theta: f64,
}

impl MobiusSelfMap {
    pub fn new(a: Complex64, theta: f64) -> Result<Self> {
        check_inside(a)?;
        if !theta.is_finite() {
            return Err(Error::OutOfRange { what: "rotation angle", value: theta });
        }
        Ok(MobiusSelfMap { a, theta })
    }

    fn rotation(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta)
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.rotation() * (z + self.a) / (1.0 + self.a.conj() * z)
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let d = 1.0 + self.a.conj() * z;
        self.rotation() * (1.0 - self.a.norm_sqr()) / (d * d)
    }

    pub fn inverse(&self) -> MobiusSelfMap {
        // w = e^{iθ}(z+a)/(1+āz)  ⇔  z = (w e^{-iθ} - a)/(1 - ā w e^{-iθ})
        //                          = e^{-iθ}(w - a e^{iθ})/(1 - ā e^{-iθ} w)
        MobiusSelfMap { a: -self.a * self.rotation(), theta: -self.theta }
    }

    /// The same map as an expression `mobius(e^{iθ}, e^{iθ}a, ā, 1)`.
    pub fn to_expr(&self) -> Expr {
        let r = self.rotation();
        Expr::mobius(r, r * self.a, self.a.conj(), Complex64::new(1.0, 0.0))
            .expect("|a| < 1 keeps the determinant 1 - |a|^2 positive")
    }
}

/// Pseudohyperbolic disk `{z : ρ(z, α) < r}` with its Euclidean description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PseudoDisk {
    pub center: Complex64,
    pub radius: f64,
    pub euclidean_center: Complex64,
    pub euclidean_radius: f64,
}

pub fn pseudo_disk(alpha: Complex64, r: f64) -> Result<PseudoDisk> {
    check_inside(alpha)?;
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::OutOfRange { what: "pseudohyperbolic radius", value: r });
    }
    // The diameter [-r, r]·u through the origin, u = α/|α|, maps to the
    // Euclidean diameter of the image disk under z ↦ (z+α)/(1+ᾱz).
    let s = alpha.norm();
    let u = if s > 0.0 { alpha / s } else { Complex64::new(1.0, 0.0) };
    let far = (s + r) / (1.0 + s * r);
    let near = (s - r) / (1.0 - s * r);
    Ok(PseudoDisk {
        center: alpha,
        radius: r,
        euclidean_center: u * (0.5 * (far + near)),
        euclidean_radius: 0.5 * (far - near),
    })
}

impl PseudoDisk {
    /// Boundary point at Euclidean angle `t` about the Euclidean center.
    pub fn boundary_point(&self, t: f64) -> Complex64 {
        self.euclidean_center + Complex64::from_polar(self.euclidean_radius, t)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        rho(z, self.center).is_ok_and(|d| d < self.radius)
    }
}

/// Data of the geodesic through `R₁` orthogonal to the real axis, used to
/// cut the annulus `R₁ < |z| < R` into curvilinear rectangles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeodesicRectangleSpec {
    pub c: f64,
    pub r: f64,
    pub r1: f64,
    /// Argument of the tangency point on `|z| = R₁`.
    pub tangency_angle: f64,
    pub y: f64,
    pub half_angle: f64,
    /// Whether `half_angle ≥ 1/(5C)`.
    pub bound_holds: bool,
}

/// `(1-R², 1-R₁²) = (1/(4C), 1/(2C))`, kept exact rather than recomputed from `R`.
pub fn outer_radii_complements(c: f64) -> (f64, f64) {
    (0.25 / c, 0.5 / c)
}

pub fn geodesic_rectangle(c: f64) -> Result<GeodesicRectangleSpec> {
    if !(c > 2.0 && c.is_finite()) {
        return Err(Error::OutOfRange { what: "C (must exceed 2)", value: c });
    }
    let (a, b) = outer_radii_complements(c);
    let r = (1.0 - a).sqrt();
    let r1 = (1.0 - b).sqrt();
    // y² = (R²-R₁²)/(1-R²R₁²) with the numerator and denominator expanded in a, b.
    let y = (a / (a + b - a * b)).sqrt();
    let half_angle = mobius_r1(r1, Complex64::new(0.0, y)).arg();
    Ok(GeodesicRectangleSpec {
        c,
        r,
        r1,
        tangency_angle: 0.0,
        y,
        half_angle,
        bound_holds: half_angle >= 1.0 / (5.0 * c),
    })
}

/// `T(z) = (z + R₁)/(1 + R₁ z)`, which carries the imaginary axis onto the
/// geodesic tangent to `|z| = R₁` at `R₁`.
pub fn mobius_r1(r1: f64, z: Complex64) -> Complex64 {
    (z + r1) / (1.0 + r1 * z)
}

impl GeodesicRectangleSpec {
    /// `(| |T(iy)| - R |, |arg T(iy) + arg T(-iy)|)`.
    pub fn tangency_residuals(&self) -> (f64, f64) {
        let up = mobius_r1(self.r1, Complex64::new(0.0, self.y));
        let down = mobius_r1(self.r1, Complex64::new(0.0, -self.y));
        ((up.norm() - self.r).abs(), (up.arg() + down.arg()).abs())
    }

    /// The closed form `atan(y/(1+y²)·(1-R₁²)/R₁)` of the half angle.
    pub fn half_angle_closed_form(&self) -> f64 {
        let (_, b) = outer_radii_complements(self.c);
        (self.y / (1.0 + self.y * self.y) * b / self.r1).atan()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RectangleCount {
    pub count: u64,
    /// Set when the half-angle bound failed and `ceil(π/half_angle)` was used.
    pub fallback: bool,
}

/// `floor(5πC) + 1` rectangles, or `ceil(π/half_angle)` if the half-angle bound fails.
pub fn rectangle_count(c: f64) -> Result<RectangleCount> {
    let spec = geodesic_rectangle(c)?;
    if spec.bound_holds {
        Ok(RectangleCount { count: (5.0 * PI * c).floor() as u64 + 1, fallback: false })
    } else {
        Ok(RectangleCount { count: (PI / spec.half_angle).ceil() as u64, fallback: true })
    }
}

/// Smallest `C` on the supplied grid from which `half_angle ≥ 1/(5C)` holds
/// for every later grid value. Returns `None` if the bound fails at the last point.
pub fn empirical_c_min(grid: &[f64]) -> Result<Option<f64>> {
    let mut c_min = None;
    for &c in grid.iter().rev() {
        if geodesic_rectangle(c)?.bound_holds {
            c_min = Some(c);
        } else {
            break;
        }
    }
    Ok(c_min)
}

/// `n` points uniformly distributed (by area) in the disk `|z| < radius`,
/// drawn from a ChaCha8 stream seeded with `seed`.
pub fn disk_samples(n: usize, radius: f64, seed: u64) -> Result<Vec<Complex64>> {
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::OutOfRange { what: "sample radius (0 < r < 1)", value: radius });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| Complex64::from_polar(radius * rng.random::<f64>().sqrt(), rng.random_range(0.0..std::f64::consts::TAU)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rho_and_distance_examples() {
        let b = c(0.3, -0.4);
        assert!((rho(c(0.0, 0.0), b).unwrap() - 0.5).abs() < 1e-15);
        assert!((rho(c(0.5, 0.0), c(-0.5, 0.0)).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(hyp_dist(c(0.0, 0.0), c(0.0, 0.0)).unwrap(), 0.0);
        assert!((hyp_dist(c(0.5, 0.0), c(-0.5, 0.0)).unwrap() - 3f64.ln()).abs() < 1e-14);
        assert!(rho(c(1.0, 0.0), b).is_err());
    }

    #[test]
    fn self_map_inverse_and_expression() {
        let m = MobiusSelfMap::new(c(0.3, 0.4), 1.1).unwrap();
        let inv = m.inverse();
        let e = m.to_expr();
        for z in [c(0.1, 0.2), c(-0.6, 0.1), c(0.0, -0.9)] {
            assert!((inv.apply(m.apply(z)) - z).norm() < 1e-14);
            assert!((e.eval(z).unwrap() - m.apply(z)).norm() < 1e-14);
            let j = e.eval_jet(z, 1).unwrap();
            assert!((j.derivative(1) - m.derivative(z)).norm() < 1e-13);
        }
        for k in 0..16 {
            let z = Complex64::from_polar(1.0, k as f64 * 0.4);
            assert!((m.apply(z).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pseudo_disk_examples() {
        let d = pseudo_disk(c(0.0, 0.0), 0.3).unwrap();
        assert_eq!(d.euclidean_center, c(0.0, 0.0));
        assert!((d.euclidean_radius - 0.3).abs() < 1e-16);
        let d = pseudo_disk(c(0.5, 0.0), 0.5).unwrap();
        assert!((d.euclidean_center - c(0.4, 0.0)).norm() < 1e-15);
        assert!((d.euclidean_radius - 0.4).abs() < 1e-15);
        assert!(pseudo_disk(c(0.1, 0.0), 1.0).is_err());
        assert!(pseudo_disk(c(0.1, 0.0), 0.0).is_err());
    }

    #[test]
    fn pseudo_disk_boundary_has_constant_rho() {
        let d = pseudo_disk(c(-0.3, 0.6), 0.7).unwrap();
        for k in 0..64 {
            let z = d.boundary_point(k as f64 * std::f64::consts::TAU / 64.0);
            assert!((rho(z, d.center).unwrap() - 0.7).abs() < 1e-10);
        }
        assert!(d.contains(d.center));
    }

    #[test]
    fn rectangle_examples() {
        let g = geodesic_rectangle(4.0).unwrap();
        assert!((g.y * g.y - 8.0 / 23.0).abs() < 1e-15);
        let g = geodesic_rectangle(1e12).unwrap();
        assert!((g.y * g.y - 1.0 / 3.0).abs() < 1e-12);
        let g = geodesic_rectangle(100.0).unwrap();
        assert!(g.half_angle >= 1.0 / 500.0 && g.bound_holds);
        assert!((g.half_angle - g.half_angle_closed_form()).abs() < 1e-15);
        let (dr, sym) = g.tangency_residuals();
        assert!(dr < 1e-12 && sym < 1e-15);

        assert_eq!(rectangle_count(10.0).unwrap(), RectangleCount { count: 158, fallback: false });
        assert_eq!(rectangle_count(100.0).unwrap().count, 1571);
        assert_eq!(rectangle_count(2.5).unwrap().count, 40);
        assert!(geodesic_rectangle(2.0).is_err());
    }

    #[test]
    fn half_angle_bound_holds_from_just_above_two() {
        let grid: Vec<f64> = (0..2000).map(|k| 2.0 + 1e-6 + k as f64 * 0.05).collect();
        assert_eq!(empirical_c_min(&grid).unwrap(), Some(grid[0]));
    }
}
