//! The linear equation `u'' + ψu = 0`: fixed-step RK4 along segments, zero
//! location, the `v = |u|` differential inequality, Sturm-type separation
//! checks, Legendre zero counts and a disconjugacy falsification harness.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{legendre_poly, Expr, Polynomial};
use crate::schwarzian::NehariProfile;

pub const DEFAULT_SEED: u64 = 0xC0FFEE;
/// Segments must stay inside the closed disk of this radius.
pub const PATH_RADIUS: f64 = 1.0 - 1e-9;
pub const RICHARDSON_TOL: f64 = 1e-6;
pub const MIN_STEPS: usize = 100;
/// A local minimum of `|u|` below this fraction of `max |u|` is a zero.
pub const ZERO_TOL: f64 = 1e-8;

/// Straight segment parametrised by arclength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SegmentPath {
    pub start: Complex64,
    pub end: Complex64,
}

impl SegmentPath {
    pub fn new(start: Complex64, end: Complex64) -> Result<Self> {
        for z in [start, end] {
            if !(z.norm() <= PATH_RADIUS) {
                return Err(Error::OutsideDisk { z });
            }
        }
        if start == end {
            return Err(Error::OutOfRange { what: "segment length", value: 0.0 });
        }
        Ok(SegmentPath { start, end })
    }

    pub fn length(&self) -> f64 {
        (self.end - self.start).norm()
    }

    /// Unit tangent `z'(s)`.
    pub fn direction(&self) -> Complex64 {
        (self.end - self.start) / self.length()
    }

    pub fn point(&self, s: f64) -> Complex64 {
        self.start + self.direction() * s
    }
}

/// Samples of `u` and `u' = du/dz` along a segment.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentSolution {
    pub path: SegmentPath,
    pub psi: Expr,
    pub s: Vec<f64>,
    pub u: Vec<Complex64>,
    pub du: Vec<Complex64>,
    /// Richardson estimate of the relative integration error.
    pub residual_estimate: f64,
}

impl SegmentSolution {
    pub fn v(&self) -> Vec<f64> {
        self.u.iter().map(|u| u.norm()).collect()
    }

    pub fn step(&self) -> f64 {
        self.s[1] - self.s[0]
    }

    fn max_abs(&self) -> f64 {
        self.u.iter().fold(0.0f64, |m, u| m.max(u.norm()))
    }
}

type State = (Complex64, Complex64);

fn rk4_step(y: State, e: Complex64, h: f64, psi0: Complex64, psi_mid: Complex64, psi1: Complex64) -> State {
    let f = |(u, w): State, psi: Complex64| (e * w, -e * psi * u);
    let (u, w) = y;
    let k1 = f(y, psi0);
    let k2 = f((u + k1.0 * (0.5 * h), w + k1.1 * (0.5 * h)), psi_mid);
    let k3 = f((u + k2.0 * (0.5 * h), w + k2.1 * (0.5 * h)), psi_mid);
    let k4 = f((u + k3.0 * h, w + k3.1 * h), psi1);
    (
        u + (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0) * (h / 6.0),
        w + (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1) * (h / 6.0),
    )
}

/// RK4 over `n` steps of size `h`, reading ψ from half-step samples with the given stride.
fn rk4_run(y0: State, e: Complex64, h: f64, n: usize, psi_half: &[Complex64], stride: usize) -> Vec<State> {
    let mut out = Vec::with_capacity(n + 1);
    let mut y = y0;
    out.push(y);
    for k in 0..n {
        let base = 2 * k * stride;
        y = rk4_step(y, e, h, psi_half[base], psi_half[base + stride], psi_half[base + 2 * stride]);
        out.push(y);
    }
    out
}

/// Integrate `u'' + ψu = 0` from `u(α) = u0`, `u'(α) = du0` along `path`.
///
/// The run is repeated with twice the step; if the two disagree by more than
/// `15e-6 · max|u|` the step count is rejected.
pub fn integrate_segment(
    psi: &Expr,
    path: SegmentPath,
    u0: Complex64,
    du0: Complex64,
    steps: usize,
) -> Result<SegmentSolution> {
    if steps < MIN_STEPS {
        return Err(Error::OutOfRange { what: "step count (minimum 100)", value: steps as f64 });
    }
    let n = steps + steps % 2;
    let b = path.length();
    let h = b / n as f64;
    let e = path.direction();
    let psi_half = (0..=2 * n)
        .into_par_iter()
        .map(|k| psi.eval(path.point(0.5 * h * k as f64)))
        .collect::<Result<Vec<_>>>()?;

    let fine = rk4_run((u0, du0), e, h, n, &psi_half, 1);
    let coarse = rk4_run((u0, du0), e, 2.0 * h, n / 2, &psi_half, 2);
    let scale = fine.iter().fold(0.0f64, |m, y| m.max(y.0.norm()));
    let diff = coarse
        .iter()
        .enumerate()
        .fold(0.0f64, |m, (k, y)| m.max((y.0 - fine[2 * k].0).norm()));
    if !scale.is_finite() || !diff.is_finite() {
        return Err(Error::StepsTooSmall { residual: f64::INFINITY });
    }
    let residual = if scale > 0.0 { diff / 15.0 / scale } else { 0.0 };
    if residual > RICHARDSON_TOL {
        return Err(Error::StepsTooSmall { residual });
    }
    Ok(SegmentSolution {
        path,
        psi: psi.clone(),
        s: (0..=n).map(|k| k as f64 * h).collect(),
        u: fine.iter().map(|y| y.0).collect(),
        du: fine.iter().map(|y| y.1).collect(),
        residual_estimate: residual,
    })
}

/// Zeros of a solution, in increasing order of the path parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroRecord {
    pub zeros: Vec<f64>,
    pub count: usize,
    pub min_gap: Option<f64>,
}

impl ZeroRecord {
    pub fn from_sorted(zeros: Vec<f64>) -> Self {
        let min_gap = zeros.windows(2).map(|w| w[1] - w[0]).reduce(f64::min);
        ZeroRecord { count: zeros.len(), zeros, min_gap }
    }
}

/// Continue the solution from sample `i` by `delta` with RK4 substeps,
/// evaluating ψ directly.
fn continue_from(sol: &SegmentSolution, i: usize, delta: f64) -> Result<State> {
    const SUB: usize = 16;
    let e = sol.path.direction();
    let h = delta / SUB as f64;
    let s0 = sol.s[i];
    let mut y = (sol.u[i], sol.du[i]);
    for k in 0..SUB {
        let s = s0 + k as f64 * h;
        let p0 = sol.psi.eval(sol.path.point(s))?;
        let pm = sol.psi.eval(sol.path.point(s + 0.5 * h))?;
        let p1 = sol.psi.eval(sol.path.point(s + h))?;
        y = rk4_step(y, e, h, p0, pm, p1);
    }
    Ok(y)
}

/// Zeros of `u` on the segment: local minima of `|u|` refined by Newton's
/// method on the locally continued solution, kept when `|u|` drops below
/// `ZERO_TOL · max|u|`.
pub fn find_zeros(sol: &SegmentSolution) -> Result<ZeroRecord> {
    let v = sol.v();
    let n = v.len();
    let scale = sol.max_abs();
    if scale == 0.0 {
        return Err(Error::TrivialInitialData);
    }
    let h = sol.step();
    let e = sol.path.direction();
    let b = *sol.s.last().unwrap();
    let mut zeros: Vec<f64> = Vec::new();
    for i in 0..n {
        let left_ok = i == 0 || v[i] <= v[i - 1];
        let right_ok = i + 1 == n || v[i] <= v[i + 1];
        if !(left_ok && right_ok) || v[i] > 0.1 * scale {
            continue;
        }
        let mut delta = 0.0;
        let mut state = (sol.u[i], sol.du[i]);
        for _ in 0..30 {
            let slope = e * state.1;
            if slope.norm() == 0.0 {
                break;
            }
            let step = (state.0 / slope).re;
            delta = (delta - step).clamp(-2.0 * h, 2.0 * h);
            state = if delta == 0.0 { (sol.u[i], sol.du[i]) } else { continue_from(sol, i, delta)? };
            if step.abs() < 1e-15 * b.max(1.0) {
                break;
            }
        }
        let s = sol.s[i] + delta;
        let tol = 1e-12 * b.max(1.0);
        if state.0.norm() < ZERO_TOL * scale && s >= -tol && s <= b + tol {
            let s = s.clamp(0.0, b);
            if zeros.last().is_none_or(|&last| s - last > 0.5 * h) {
                zeros.push(s);
            }
        }
    }
    Ok(ZeroRecord::from_sorted(zeros))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma1Report {
    /// Minimum of `v'' + |ψ| v` over tested interior points.
    pub min_residual: f64,
    pub scale: f64,
    pub tested: usize,
    /// Interior stencils skipped because `v ≤ 1e-8` there.
    pub skipped: usize,
    pub pass: bool,
}

pub const LEMMA1_FLOOR: f64 = 1e-8;
pub const LEMMA1_TOL: f64 = 1e-6;

/// `min (v'' + |ψ(z(s))| v)` with `v = |u|` and `v''` from central differences.
pub fn lemma1_residual(sol: &SegmentSolution, psi: &Expr) -> Result<Lemma1Report> {
    let v = sol.v();
    let h = sol.step();
    let psi_abs = sol
        .s
        .iter()
        .map(|&s| psi.eval(sol.path.point(s)).map(|p| p.norm()))
        .collect::<Result<Vec<_>>>()?;
    let mut min_residual = f64::INFINITY;
    let mut tested = 0;
    let mut skipped = 0;
    let mut scale = 1.0f64;
    for i in 1..v.len() - 1 {
        if v[i - 1] <= LEMMA1_FLOOR || v[i] <= LEMMA1_FLOOR || v[i + 1] <= LEMMA1_FLOOR {
            skipped += 1;
            continue;
        }
        let vpp = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h);
        min_residual = min_residual.min(vpp + psi_abs[i] * v[i]);
        scale = scale.max(psi_abs[i] * v[i]);
        tested += 1;
    }
    let pass = tested == 0 || min_residual >= -LEMMA1_TOL * scale;
    Ok(Lemma1Report { min_residual, scale, tested, skipped, pass })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeparationCheck {
    pub pass: bool,
    /// Fewer than two zeros: nothing to compare.
    pub vacuous: bool,
    pub min_gap: Option<f64>,
    pub bound: f64,
}

pub const SEPARATION_SLACK: f64 = 1e-9;

/// Zeros of a solution with `|ψ| ≤ C/2` are at least `π√(2/C)` apart.
pub fn zero_separation_check(c: f64, record: &ZeroRecord) -> Result<SeparationCheck> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::OutOfRange { what: "C", value: c });
    }
    let bound = std::f64::consts::PI * (2.0 / c).sqrt();
    Ok(match record.min_gap {
        None => SeparationCheck { pass: true, vacuous: true, min_gap: None, bound },
        Some(g) => SeparationCheck { pass: g >= bound - SEPARATION_SLACK, vacuous: false, min_gap: Some(g), bound },
    })
}

/// Zeros of `y = (1-x²)P_n'` in `(-1, 1)` with a cross-check by direct
/// integration of `y'' + n(n+1)/(1-x²) y = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LegendreReport {
    pub n: usize,
    pub record: ZeroRecord,
    pub expected: usize,
    /// Sign changes of the integrated solution, when computed.
    pub ode_sign_changes: Option<usize>,
}

pub const LEGENDRE_MAX_N: usize = 30;

/// `(P_n(x), P_n'(x))` from the three-term recurrence and
/// `P'_{k+1} = P'_{k-1} + (2k+1) P_k`.
fn legendre_value_and_slope(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    let (mut d0, mut d1) = (0.0, 1.0);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        let d2 = d0 + (2.0 * kf + 1.0) * p1;
        (p0, p1, d0, d1) = (p1, p2, d1, d2);
    }
    (p1, d1)
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> Result<f64> {
    let (mut fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Isolation(format!("no sign change on [{a}, {b}]")));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

pub fn legendre_lower_bound(n: usize) -> Result<LegendreReport> {
    legendre_report(n, false)
}

pub fn legendre_lower_bound_with_ode(n: usize) -> Result<LegendreReport> {
    legendre_report(n, true)
}

fn legendre_report(n: usize, with_ode: bool) -> Result<LegendreReport> {
    if n == 0 || n > LEGENDRE_MAX_N {
        return Err(Error::OutOfRange { what: "Legendre degree (1..=30)", value: n as f64 });
    }
    let expected = n - 1;
    let slope = |x: f64| legendre_value_and_slope(n, x).1;
    // Zeros of P_n' interlace with those of P_n, spaced at least ~π/n² apart.
    let cells = 400 * n * n;
    let mut zeros = Vec::new();
    let mut prev_x = -1.0;
    let mut prev_f = slope(prev_x);
    for k in 1..=cells {
        let x = -1.0 + 2.0 * k as f64 / cells as f64;
        let fx = slope(x);
        if fx == 0.0 {
            // an exact zero on a node (x = 0 for even n) counts once
            if x < 1.0 {
                zeros.push(x);
            }
        } else if prev_f != 0.0 && fx.signum() != prev_f.signum() && prev_x > -1.0 {
            zeros.push(bisect(slope, prev_x, x)?);
        }
        prev_x = x;
        prev_f = fx;
    }
    if zeros.len() != expected {
        return Err(Error::Isolation(format!(
            "found {} zeros of P_{n}' but expected {expected}",
            zeros.len()
        )));
    }
    let ode_sign_changes = if with_ode { Some(legendre_ode_sign_changes(n)?) } else { None };
    Ok(LegendreReport { n, record: ZeroRecord::from_sorted(zeros), expected, ode_sign_changes })
}

const LEGENDRE_ODE_MAX_STEPS: usize = 1 << 23;

/// Sign changes of the solution of `y'' + n(n+1)/(1-x²) y = 0` with
/// `y(-1+1e-6) = 0`, `y' = 1`, integrated to `1 - 1e-6`.
pub fn legendre_ode_sign_changes(n: usize) -> Result<usize> {
    let c = (n * (n + 1)) as f64;
    let standoff = 1e-6;
    let a = -1.0 + standoff;
    let path = SegmentPath::new(Complex64::new(a, 0.0), Complex64::new(-a, 0.0))?;
    let psi_max = c / (standoff * (2.0 - standoff));
    let mut steps = ((path.length() * psi_max.sqrt() / 0.5).ceil() as usize).max(20_000);
    let psi = Expr::real(c) / (Expr::real(1.0) - Expr::Var.powi(2));
    // ψ is nearly singular at the standoff, so the step count is raised
    // until the Richardson check accepts the run
    let sol = loop {
        match integrate_segment(&psi, path, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), steps) {
            Err(Error::StepsTooSmall { .. }) if steps < LEGENDRE_ODE_MAX_STEPS => steps *= 4,
            other => break other?,
        }
    };
    Ok(count_sign_changes(sol.u.iter().skip(1).map(|u| u.re)))
}

fn count_sign_changes<I: Iterator<Item = f64>>(values: I) -> usize {
    let mut count = 0;
    let mut last = 0.0f64;
    for x in values {
        if x != 0.0 {
            if last != 0.0 && x.signum() != last.signum() {
                count += 1;
            }
            last = x;
        }
    }
    count
}

/// The Legendre polynomial whose derivative carries the zeros above.
pub fn legendre_polynomial(n: usize) -> Result<Polynomial> {
    legendre_poly(n)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisconjugacyReport {
    pub profile: NehariProfile,
    pub trials: usize,
    pub seed: u64,
    pub max_zeros: usize,
    pub zero_counts: Vec<usize>,
    pub pass: bool,
}

pub const DISCONJUGACY_STANDOFF: f64 = 1e-6;
const TANH_STEP: f64 = 2e-3;

/// Integrate `u'' + p(x)u = 0` in the variable `t = atanh x`, where it reads
/// `U'' = -2xU' - (1-x²)² p(x) U` with bounded coefficients, and count sign
/// changes on `|x| < 1 - 1e-6`.
fn tanh_trial(profile: NehariProfile, x0: f64, angle: f64) -> Result<usize> {
    let t_end = (1.0 - DISCONJUGACY_STANDOFF).atanh();
    let t0 = x0.atanh();
    let (u0, ux0) = (angle.cos(), angle.sin());
    let y0 = (u0, ux0 * (1.0 - x0 * x0));
    let rhs = |t: f64, (u, w): (f64, f64)| {
        let x = t.tanh();
        (w, -2.0 * x * w - profile.weighted(x) * u)
    };
    let run = |dir: f64| -> Result<Vec<f64>> {
        let span = if dir > 0.0 { t_end - t0 } else { t0 + t_end };
        let n = ((span / TANH_STEP).ceil() as usize).max(1);
        let h = dir * span / n as f64;
        let mut y = y0;
        let mut out = Vec::with_capacity(n);
        let mut t = t0;
        for _ in 0..n {
            let k1 = rhs(t, y);
            let k2 = rhs(t + 0.5 * h, (y.0 + 0.5 * h * k1.0, y.1 + 0.5 * h * k1.1));
            let k3 = rhs(t + 0.5 * h, (y.0 + 0.5 * h * k2.0, y.1 + 0.5 * h * k2.1));
            let k4 = rhs(t + h, (y.0 + h * k3.0, y.1 + h * k3.1));
            y = (
                y.0 + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
                y.1 + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
            );
            t += h;
            if !(y.0.is_finite() && y.1.is_finite()) {
                return Err(Error::BlowUp { reached: t.tanh() });
            }
            out.push(y.0);
        }
        Ok(out)
    };
    let forward = run(1.0)?;
    let backward = run(-1.0)?;
    // Walk from the left endpoint to the right one through the base point.
    let path = backward.into_iter().rev().chain(std::iter::once(u0)).chain(forward);
    Ok(count_sign_changes(path))
}

pub fn disconjugacy_check(profile: NehariProfile, trials: usize, seed: u64) -> Result<DisconjugacyReport> {
    if trials == 0 {
        return Err(Error::OutOfRange { what: "trial count", value: 0.0 });
    }
    let zero_counts = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let x0 = rng.random_range(-0.99..0.99);
            let angle = rng.random_range(0.0..std::f64::consts::TAU);
            tanh_trial(profile, x0, angle)
        })
        .collect::<Result<Vec<_>>>()?;
    let max_zeros = zero_counts.iter().copied().max().unwrap_or(0);
    Ok(DisconjugacyReport { profile, trials, seed, max_zeros, zero_counts, pass: max_zeros <= 1 })
}

/// Zero count for explicit initial data `(u(x0), u'(x0))`.
pub fn disconjugacy_trial(profile: NehariProfile, x0: f64, u0: f64, du0: f64) -> Result<usize> {
    if u0 == 0.0 && du0 == 0.0 {
        return Err(Error::TrivialInitialData);
    }
    if !(x0.abs() < 1.0 - DISCONJUGACY_STANDOFF) {
        return Err(Error::OutOfRange { what: "base point", value: x0 });
    }
    tanh_trial(profile, x0, du0.atan2(u0))
}
