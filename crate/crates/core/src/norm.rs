//! Grid-plus-ascent estimation of weighted suprema over the unit disk.
//!
//! The estimators here maximise `(1-|z|^2)^2 |S(z)|` for any pointwise
//! evaluator `S`. Results are lower bounds: the reported value is attained at
//! the reported point.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Polar sampling grid. Radii are `1 - (1 - r_max)^t` for `t` uniform on
/// `[0, 1]`, which crowds samples toward the boundary circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub radial: usize,
    pub angular: usize,
    pub r_max: f64,
    pub refine: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { radial: 400, angular: 400, r_max: 1.0 - 1e-6, refine: true }
    }
}

impl GridSpec {
    pub fn new(radial: usize, angular: usize) -> Self {
        GridSpec { radial, angular, ..GridSpec::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.radial < 2 {
            return Err(Error::OutOfRange { what: "radial grid size", value: self.radial as f64 });
        }
        if self.angular < 1 {
            return Err(Error::OutOfRange { what: "angular grid size", value: self.angular as f64 });
        }
        if !(self.r_max > 0.0 && self.r_max < 1.0) {
            return Err(Error::OutOfRange { what: "grid r_max", value: self.r_max });
        }
        Ok(())
    }

    fn radius(&self, t: f64) -> f64 {
        1.0 - (1.0 - self.r_max).powf(t)
    }

    fn point(&self, t: f64, theta: f64) -> Complex64 {
        Complex64::from_polar(self.radius(t), theta)
    }

    fn dt(&self) -> f64 {
        1.0 / (self.radial - 1) as f64
    }

    fn dtheta(&self) -> f64 {
        std::f64::consts::TAU / self.angular as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormEstimate {
    pub lower_bound: f64,
    pub attaining_point: Complex64,
    /// Radial parameter spacing of the sampling grid.
    pub grid_resolution: f64,
    pub refined: bool,
    /// Samples dropped because the evaluator failed or returned a nonfinite value.
    pub skipped: usize,
}

const MAX_ASCENT_ROUNDS: usize = 400;

fn weighted<F>(s: &F, z: Complex64) -> Option<f64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let w = 1.0 - z.norm_sqr();
    match s(z) {
        Ok(v) if v.re.is_finite() && v.im.is_finite() => Some(w * w * v.norm()),
        _ => None,
    }
}

fn better(a: (f64, Complex64), b: (f64, Complex64)) -> bool {
    // strictly larger value wins; equal values go to the lexicographically smaller point
    a.0 > b.0 || (a.0 == b.0 && (a.1.re, a.1.im) < (b.1.re, b.1.im))
}

/// Estimate `sup (1-|z|^2)^2 |S(z)|` over the disk.
pub fn estimate_weighted_sup<F>(s: F, grid: &GridSpec) -> Result<NormEstimate>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    grid.validate()?;
    let (dt, dth) = (grid.dt(), grid.dtheta());
    let samples: Vec<Option<(f64, Complex64, f64, f64)>> = (0..grid.radial * grid.angular)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / grid.angular, idx % grid.angular);
            let (t, th) = (i as f64 * dt, j as f64 * dth);
            let z = grid.point(t, th);
            weighted(&s, z).map(|v| (v, z, t, th))
        })
        .collect();

    let mut skipped = 0;
    let mut best: Option<(f64, Complex64, f64, f64)> = None;
    for sample in samples {
        match sample {
            None => skipped += 1,
            Some(c) => {
                if best.is_none_or(|b| better((c.0, c.1), (b.0, b.1))) {
                    best = Some(c);
                }
            }
        }
    }
    let Some((mut value, mut point, mut t, mut th)) = best else {
        return Err(Error::NoValidSamples { skipped });
    };

    if grid.refine {
        let objective = |t: f64, th: f64| weighted(&s, grid.point(t, th)).unwrap_or(f64::NEG_INFINITY);
        // A bracket whose optimum lands near its edge is doubled, otherwise
        // halved. Suprema approached at the boundary sit at the end of ridges
        // that narrow like 1-|z|, which shrinking-only brackets cannot follow.
        let (mut ht, mut hth) = (dt, dth);
        for _ in 0..MAX_ASCENT_ROUNDS {
            let (lo, hi) = ((t - ht).max(0.0), (t + ht).min(1.0));
            let (t_new, v_t) = golden_max(|x| objective(x, th), lo, hi);
            let mut t_edge = false;
            if v_t > value {
                value = v_t;
                t_edge = (t_new - t).abs() > 0.8 * ht && t_new > 0.0 && t_new < 1.0;
                t = t_new;
                point = grid.point(t, th);
            }
            let (th_new, v_th) = golden_max(|x| objective(t, x), th - hth, th + hth);
            let mut th_edge = false;
            if v_th > value {
                value = v_th;
                th_edge = (th_new - th).abs() > 0.8 * hth;
                th = th_new;
                point = grid.point(t, th);
            }
            ht = if t_edge { (2.0 * ht).min(1.0) } else { 0.5 * ht };
            hth = if th_edge { (2.0 * hth).min(std::f64::consts::PI) } else { 0.5 * hth };
            if ht < 1e-16 && hth < 1e-16 {
                break;
            }
        }
    }

    Ok(NormEstimate {
        lower_bound: value,
        attaining_point: point,
        grid_resolution: dt,
        refined: grid.refine,
        skipped,
    })
}

/// Golden-section search for a maximum of `f` on `[a, b]`; returns the best
/// evaluated abscissa and its value.
fn golden_max<G: Fn(f64) -> f64>(f: G, mut a: f64, mut b: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    for _ in 0..60 {
        if (b - a).abs() < 1e-15 {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
            if fc > best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
            if fd > best.1 {
                best = (d, fd);
            }
        }
    }
    best
}
