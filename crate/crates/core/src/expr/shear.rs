//! The analytic part `h` of the Koebe shear with dilatation `e^{iθ}z²`:
//! `h' = k'/(1 - e^{iθ}z²)` with `k' = (1+z)/(1-z)³` and `h(0) = 0`.

use num_complex::Complex64;

use super::jet::Jet;
use crate::error::{Error, Result};
use crate::quad::segment_integral;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Below this distance between `1/b` and `±1` the partial fractions lose
/// more than a few digits, and the value is integrated instead.
const PARTIAL_FRACTION_MIN_GAP: f64 = 0.2;

fn half_rotation(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta / 2.0)
}

/// `h'` as a jet in the variable `x`.
fn derivative_jet(theta: f64, x: &Jet) -> Result<Jet> {
    let b2 = half_rotation(theta).powi(2);
    let one_minus = -*x + ONE;
    let num = *x + ONE;
    let den = one_minus.powi(3)? * (-(*x * *x).scale(b2) + ONE);
    num.checked_div(&den)
}

fn derivative_at(theta: f64, z: Complex64) -> Result<Complex64> {
    Ok(derivative_jet(theta, &Jet::variable(z, 0)?)?.value())
}

/// `h(z)` from the partial fractions
/// `A3/(1-z)³ + A2/(1-z)² + A1/(1-z) + B1/(1-bz) + B2/(1+bz)` of `h'`.
fn value_partial_fractions(theta: f64, z: Complex64) -> Result<Complex64> {
    let b = half_rotation(theta);
    if theta == 0.0 {
        // h' = (1-z)^-4
        return Ok(((1.0 - z).powi(-3) - 1.0) / 3.0);
    }
    // G = (1+z)/(1-b²z²) expanded about z = 1
    let x = Jet::variable(ONE, 2)?;
    let g = (x + ONE).checked_div(&(-(x * x).scale(b * b) + ONE))?;
    let (a3, a2, a1) = (g.value(), -g.derivative(1), g.derivative(2) / 2.0);
    let ib = 1.0 / b;
    let b1 = (1.0 + ib) / (2.0 * (1.0 - ib).powi(3));
    let b2 = (1.0 - ib) / (2.0 * (1.0 + ib).powi(3));
    let w = 1.0 - z;
    Ok(a3 / 2.0 * (w.powi(-2) - 1.0) + a2 * (1.0 / w - 1.0) - a1 * w.ln() - b1 / b * (1.0 - b * z).ln()
        + b2 / b * (1.0 + b * z).ln())
}

pub(crate) fn value(theta: f64, z: Complex64) -> Result<Complex64> {
    if z.norm() >= 1.0 {
        return Err(Error::OutsideDisk { z });
    }
    let ib = 1.0 / half_rotation(theta);
    let gap = (1.0 - ib).norm().min((1.0 + ib).norm());
    if theta == 0.0 || gap >= PARTIAL_FRACTION_MIN_GAP {
        value_partial_fractions(theta, z)
    } else {
        segment_integral(|t| derivative_at(theta, t), Complex64::new(0.0, 0.0), z, 1e-14, 1e-16)
    }
}

/// `h(x)` for a jet `x`: the Taylor coefficients of `h` at `x(base)` come
/// from the jet of `h'`, then the series is composed with `x`.
pub(crate) fn apply(theta: f64, x: &Jet) -> Result<Jet> {
    let x0 = x.value();
    let n = x.order();
    let h0 = value(theta, x0)?;
    let mut coeffs = vec![h0];
    if n > 0 {
        let dh = derivative_jet(theta, &Jet::variable(x0, n - 1)?)?;
        coeffs.extend((1..=n).map(|k| dh.coeffs()[k - 1] / k as f64));
    }
    let t = *x + (-x0);
    let mut acc = Jet::constant(x.base_point(), coeffs[n], n)?;
    for k in (0..n).rev() {
        acc = acc * t + coeffs[k];
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn both_value_paths_agree_where_both_are_accurate() {
        for theta in [0.8, 2.0, 3.5, 5.0] {
            for z in [c(0.3, 0.2), c(-0.6, 0.5), c(0.1, -0.9)] {
                let pf = value_partial_fractions(theta, z).unwrap();
                let quad = segment_integral(|t| derivative_at(theta, t), c(0.0, 0.0), z, 1e-14, 1e-16).unwrap();
                assert!((pf - quad).norm() < 1e-12 * pf.norm().max(1.0), "θ={theta} z={z}: {pf} vs {quad}");
            }
        }
    }

    #[test]
    fn jet_coefficients_follow_the_derivative() {
        let z = c(0.2, -0.3);
        let j = apply(1e-3, &Jet::variable(z, 3).unwrap()).unwrap();
        let d = derivative_jet(1e-3, &Jet::variable(z, 2).unwrap()).unwrap();
        for k in 1..=3 {
            assert!((j.coeffs()[k] - d.coeffs()[k - 1] / k as f64).norm() < 1e-13 * d.coeffs()[k - 1].norm());
        }
    }

    #[test]
    fn outside_the_disk_is_rejected() {
        assert!(matches!(value(1.0, c(1.0, 0.0)), Err(Error::OutsideDisk { .. })));
    }
}
