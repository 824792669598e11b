//! One-dimensional quadrature: adaptive Simpson for real integrands and
//! adaptive Gauss-Legendre panels for complex path integrals.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 50;

/// Adaptive Simpson with relative tolerance `rel_tol`. Nonfinite samples
/// abort with an error.
///
/// The absolute target starts from the three-point estimate, which can
/// overshoot badly for integrands peaked at an endpoint, so the integration
/// is repeated against the computed magnitude until the two agree.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    check_finite(&[fa, fm, fb], m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut magnitude = whole.abs().max(1e-300);
    let mut value = 0.0;
    for _ in 0..8 {
        value = simpson_step(&f, a, b, fa, fm, fb, whole, rel_tol * magnitude, MAX_DEPTH)?;
        if value.abs() >= 0.5 * magnitude || value == 0.0 {
            break;
        }
        magnitude = value.abs();
    }
    Ok(value)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    check_finite(&[flm, frm], m)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || (b - a).abs() < 1e-15 * (a.abs() + b.abs()).max(1.0) {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Quadrature(format!(
            "adaptive Simpson hit the depth limit on [{a}, {b}]"
        )));
    }
    Ok(simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

fn check_finite(values: &[f64], at: f64) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Quadrature(format!("nonfinite integrand near x = {at}")))
    }
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// from Newton iteration on `P_n` evaluated by the three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const PANEL_NODES: usize = 12;

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_NODES))
}

fn gl_panel<F>(f: &F, a: f64, b: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let (nodes, weights) = panel_rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in nodes.iter().zip(weights) {
        acc += f(mid + half * x)? * *w;
    }
    Ok(acc * half)
}

/// Adaptive Gauss-Legendre integral of a complex-valued `f` over `[a, b]`:
/// a panel is accepted once it agrees with the sum over its two halves to
/// `abs_tol + rel_tol * |I|`.
pub fn adaptive_gauss_complex<F>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let whole = gl_panel(&f, a, b)?;
    gauss_step(&f, a, b, whole, rel_tol, abs_tol, MAX_DEPTH)
}

fn gauss_step<F>(
    f: &F,
    a: f64,
    b: f64,
    whole: Complex64,
    rel_tol: f64,
    abs_tol: f64,
    depth: u32,
) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let m = 0.5 * (a + b);
    let left = gl_panel(f, a, m)?;
    let right = gl_panel(f, m, b)?;
    let refined = left + right;
    let err = (refined - whole).norm();
    if !err.is_finite() {
        return Err(Error::Quadrature(format!("nonfinite integrand on [{a}, {b}]")));
    }
    if err <= abs_tol + rel_tol * refined.norm() {
        return Ok(refined);
    }
    if depth == 0 {
        return Err(Error::Quadrature(format!(
            "Gauss-Legendre panels did not converge on [{a}, {b}] (error {err:e})"
        )));
    }
    Ok(gauss_step(f, a, m, left, rel_tol, 0.5 * abs_tol, depth - 1)?
        + gauss_step(f, m, b, right, rel_tol, 0.5 * abs_tol, depth - 1)?)
}

/// `∫ f(ζ) dζ` along the straight segment from `from` to `to`.
pub fn segment_integral<F>(f: F, from: Complex64, to: Complex64, rel_tol: f64, abs_tol: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let dir = to - from;
    if dir.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let inner = adaptive_gauss_complex(|t| f(from + dir * t), 0.0, 1.0, rel_tol, abs_tol)?;
    Ok(inner * dir)
}
