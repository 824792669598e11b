//! Truncated complex Taylor jets.
//!
//! A [`Jet`] of order `n` at a base point `z0` stores the normalized Taylor
//! coefficients `c[k] = f^(k)(z0) / k!` for `k = 0..=n`. All arithmetic is
//! truncated at the smaller order of the operands, so composing jets yields
//! exact derivatives up to rounding.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 6;

/// Denominators below this modulus are treated as poles.
pub const POLE_THRESHOLD: f64 = 1e-300;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    base: Complex64,
    order: usize,
    coeffs: [Complex64; MAX_ORDER + 1],
}

impl Jet {
    pub fn constant(base: Complex64, value: Complex64, order: usize) -> Result<Self> {
        check_order(order)?;
        let mut coeffs = [ZERO; MAX_ORDER + 1];
        coeffs[0] = value;
        Ok(Jet { base, order, coeffs })
    }

    /// The jet of the identity map at `base`.
    pub fn variable(base: Complex64, order: usize) -> Result<Self> {
        check_order(order)?;
        let mut coeffs = [ZERO; MAX_ORDER + 1];
        coeffs[0] = base;
        if order >= 1 {
            coeffs[1] = ONE;
        }
        Ok(Jet { base, order, coeffs })
    }

    /// Builds a jet from explicit coefficients; the order is `coeffs.len() - 1`.
    pub fn from_coeffs(base: Complex64, coeffs: &[Complex64]) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::OutOfRange { what: "jet length", value: 0.0 });
        }
        let order = coeffs.len() - 1;
        check_order(order)?;
        let mut c = [ZERO; MAX_ORDER + 1];
        c[..coeffs.len()].copy_from_slice(coeffs);
        Ok(Jet { base, order, coeffs: c })
    }

    pub fn base_point(&self) -> Complex64 {
        self.base
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs[..=self.order]
    }

    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// The `k`-th derivative, `k! * c[k]`. Returns zero past the jet order.
    pub fn derivative(&self, k: usize) -> Complex64 {
        if k > self.order {
            return ZERO;
        }
        self.coeffs[k] * factorial(k)
    }

    pub fn scale(&self, s: Complex64) -> Jet {
        let mut out = *self;
        for c in out.coeffs.iter_mut() {
            *c *= s;
        }
        out
    }

    fn zeros_like(&self, order: usize) -> Jet {
        Jet { base: self.base, order, coeffs: [ZERO; MAX_ORDER + 1] }
    }

    pub fn recip(&self) -> Result<Jet> {
        let b0 = self.coeffs[0];
        if b0.norm() < POLE_THRESHOLD {
            return Err(Error::Pole { at: self.base });
        }
        let mut q = self.zeros_like(self.order);
        q.coeffs[0] = b0.inv();
        for k in 1..=self.order {
            let mut acc = ZERO;
            for i in 1..=k {
                acc += self.coeffs[i] * q.coeffs[k - i];
            }
            q.coeffs[k] = -acc / b0;
        }
        Ok(q)
    }

    pub fn checked_div(&self, rhs: &Jet) -> Result<Jet> {
        let b0 = rhs.coeffs[0];
        if b0.norm() < POLE_THRESHOLD {
            return Err(Error::Pole { at: self.base });
        }
        let order = self.order.min(rhs.order);
        let mut q = self.zeros_like(order);
        for k in 0..=order {
            let mut acc = self.coeffs[k];
            for i in 1..=k {
                acc -= rhs.coeffs[i] * q.coeffs[k - i];
            }
            q.coeffs[k] = acc / b0;
        }
        Ok(q)
    }

    pub fn exp(&self) -> Jet {
        let mut e = self.zeros_like(self.order);
        e.coeffs[0] = self.coeffs[0].exp();
        for k in 1..=self.order {
            let mut acc = ZERO;
            for j in 1..=k {
                acc += self.coeffs[j] * e.coeffs[k - j] * j as f64;
            }
            e.coeffs[k] = acc / k as f64;
        }
        e
    }

    /// Principal logarithm; arguments on the closed negative real axis are rejected.
    pub fn ln(&self) -> Result<Jet> {
        let a0 = self.coeffs[0];
        check_branch("log", a0, self.base)?;
        let mut l = self.zeros_like(self.order);
        l.coeffs[0] = a0.ln();
        for k in 1..=self.order {
            let mut acc = self.coeffs[k];
            for j in 1..k {
                acc -= l.coeffs[j] * self.coeffs[k - j] * (j as f64 / k as f64);
            }
            l.coeffs[k] = acc / a0;
        }
        Ok(l)
    }

    /// Principal square root; rejects the branch point and the negative real axis.
    pub fn sqrt(&self) -> Result<Jet> {
        let a0 = self.coeffs[0];
        check_branch("sqrt", a0, self.base)?;
        let mut s = self.zeros_like(self.order);
        s.coeffs[0] = a0.sqrt();
        let two_s0 = s.coeffs[0] * 2.0;
        for k in 1..=self.order {
            let mut acc = self.coeffs[k];
            for j in 1..k {
                acc -= s.coeffs[j] * s.coeffs[k - j];
            }
            s.coeffs[k] = acc / two_s0;
        }
        Ok(s)
    }

    /// Sine and cosine together, from `s' = c a'`, `c' = -s a'`.
    pub fn sin_cos(&self) -> (Jet, Jet) {
        let mut s = self.zeros_like(self.order);
        let mut c = self.zeros_like(self.order);
        s.coeffs[0] = self.coeffs[0].sin();
        c.coeffs[0] = self.coeffs[0].cos();
        for k in 1..=self.order {
            let mut acc_s = ZERO;
            let mut acc_c = ZERO;
            for j in 1..=k {
                let ja = self.coeffs[j] * j as f64;
                acc_s += ja * c.coeffs[k - j];
                acc_c -= ja * s.coeffs[k - j];
            }
            s.coeffs[k] = acc_s / k as f64;
            c.coeffs[k] = acc_c / k as f64;
        }
        (s, c)
    }

    /// Tangent via `t' = (1 + t^2) a'`.
    pub fn tan(&self) -> Result<Jet> {
        let a0 = self.coeffs[0];
        if a0.cos().norm() < POLE_THRESHOLD {
            return Err(Error::Pole { at: self.base });
        }
        let t0 = a0.tan();
        if !(t0.re.is_finite() && t0.im.is_finite()) {
            return Err(Error::Pole { at: self.base });
        }
        let mut t = self.zeros_like(self.order);
        // w = 1 + t^2, filled in as the coefficients of t become known
        let mut w = self.zeros_like(self.order);
        t.coeffs[0] = t0;
        w.coeffs[0] = ONE + t0 * t0;
        for k in 1..=self.order {
            let mut acc = ZERO;
            for j in 1..=k {
                acc += self.coeffs[j] * w.coeffs[k - j] * j as f64;
            }
            t.coeffs[k] = acc / k as f64;
            let mut sq = ZERO;
            for i in 0..=k {
                sq += t.coeffs[i] * t.coeffs[k - i];
            }
            w.coeffs[k] = sq;
        }
        Ok(t)
    }

    pub fn powi(&self, n: i32) -> Result<Jet> {
        if n < 0 {
            return self.powi(-n)?.recip();
        }
        let mut result = Jet::constant(self.base, ONE, self.order)?;
        let mut base = *self;
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base;
            }
            e >>= 1;
            if e > 0 {
                base = base * base;
            }
        }
        Ok(result)
    }
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        Err(Error::OrderTooLarge(order))
    } else {
        Ok(())
    }
}

fn check_branch(func: &'static str, arg: Complex64, base: Complex64) -> Result<()> {
    if arg.norm() < POLE_THRESHOLD {
        return Err(Error::Pole { at: base });
    }
    if arg.im == 0.0 && arg.re <= 0.0 {
        return Err(Error::Branch { func, arg });
    }
    Ok(())
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let mut out = self.zeros_like(self.order.min(rhs.order));
        for k in 0..=out.order {
            out.coeffs[k] = self.coeffs[k] + rhs.coeffs[k];
        }
        out
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        let mut out = self.zeros_like(self.order.min(rhs.order));
        for k in 0..=out.order {
            out.coeffs[k] = self.coeffs[k] - rhs.coeffs[k];
        }
        out
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut out = self.zeros_like(self.order.min(rhs.order));
        for k in 0..=out.order {
            let mut acc = ZERO;
            for i in 0..=k {
                acc += self.coeffs[i] * rhs.coeffs[k - i];
            }
            out.coeffs[k] = acc;
        }
        out
    }
}

impl Div for Jet {
    type Output = Result<Jet>;
    fn div(self, rhs: Jet) -> Result<Jet> {
        self.checked_div(&rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-ONE)
    }
}

impl Add<Complex64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Complex64) -> Jet {
        self.coeffs[0] += rhs;
        self
    }
}
