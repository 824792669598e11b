//! Oracles shared by the integration suites.
#![allow(dead_code)]

use num_complex::Complex64;
use proptest::prelude::*;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Points of the disk `|z| < r`, drawn in polar form.
pub fn disk(r: f64) -> impl Strategy<Value = Complex64> {
    (0.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(move |(s, t)| Complex64::from_polar(r * s.sqrt(), t))
}

/// Taylor coefficients `f^(k)(z)/k!` for `k ≤ max_k` from an `n`-point
/// trapezoid rule on the circle of radius `r` about `z`.
pub fn cauchy_coeffs<F: Fn(Complex64) -> Complex64>(f: F, z: Complex64, r: f64, n: usize, max_k: usize) -> Vec<Complex64> {
    let samples: Vec<(Complex64, Complex64)> = (0..n)
        .map(|j| {
            let w = Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / n as f64);
            (w, f(z + w * r))
        })
        .collect();
    (0..=max_k)
        .map(|k| {
            let sum: Complex64 = samples.iter().map(|(w, v)| v * w.powi(-(k as i32))).sum();
            sum / (n as f64 * r.powi(k as i32))
        })
        .collect()
}

/// Schwarzian from Taylor coefficients `a1, a2, a3`.
pub fn schwarzian_from_coeffs(a: &[Complex64]) -> Complex64 {
    6.0 * a[3] / a[1] - 6.0 * (a[2] / a[1]).powi(2)
}

/// Composite Gauss-Legendre (5 nodes per panel) of a real integrand.
pub fn gauss5<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    const X: [f64; 5] = [0.0, -0.538_469_310_105_683_1, 0.538_469_310_105_683_1, -0.906_179_845_938_664, 0.906_179_845_938_664];
    const W: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_47,
        0.478_628_670_499_366_47,
        0.236_926_885_056_189_08,
        0.236_926_885_056_189_08,
    ];
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let mid = a + (p as f64 + 0.5) * h;
            X.iter().zip(W).map(|(x, w)| w * f(mid + 0.5 * h * x)).sum::<f64>() * 0.5 * h
        })
        .sum()
}
