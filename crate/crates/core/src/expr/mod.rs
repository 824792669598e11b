//! Analytic expressions in one complex variable `z`, evaluated through
//! truncated Taylor jets.

mod jet;
mod parse;
mod poly;
mod shear;

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use jet::{Jet, MAX_ORDER, POLE_THRESHOLD};
pub use parse::{parse, parse_complex};
pub use poly::{legendre_poly, Polynomial};

/// Relative tolerance used to reject `mobius(a,b,c,d)` with `ad - bc = 0`.
const MOBIUS_DEGENERACY: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Tan,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sqrt => "sqrt",
        }
    }

    pub(crate) fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    fn apply(self, a: &Jet) -> Result<Jet> {
        match self {
            Func::Exp => Ok(a.exp()),
            Func::Log => a.ln(),
            Func::Sin => Ok(a.sin_cos().0),
            Func::Cos => Ok(a.sin_cos().1),
            Func::Tan => a.tan(),
            Func::Sqrt => a.sqrt(),
        }
    }
}

/// Named maps with native jet formulas.
#[derive(Debug, Clone, PartialEq)]
pub enum Builtin {
    /// `z / (1 - z)^2`
    Koebe,
    Identity,
    /// `(a z + b) / (c z + d)` with `ad - bc != 0`
    Mobius { a: Complex64, b: Complex64, c: Complex64, d: Complex64 },
    /// `tan(sqrt(C/2) z)`, whose Schwarzian is the constant `C`
    TanScaled(f64),
    /// Analytic part `h` of the Koebe shear with dilatation `e^{iθ}z²`,
    /// defined on the open unit disk
    KoebeShear(f64),
}

impl Builtin {
    pub fn mobius(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Builtin> {
        let det = a * d - b * c;
        let scale = (a * d).norm() + (b * c).norm();
        if det.norm() <= MOBIUS_DEGENERACY * scale || scale == 0.0 {
            return Err(Error::DegenerateMobius);
        }
        Ok(Builtin::Mobius { a, b, c, d })
    }

    pub fn tan_scaled(c: f64) -> Result<Builtin> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::OutOfRange { what: "tan_scaled constant", value: c });
        }
        Ok(Builtin::TanScaled(c))
    }

    pub fn koebe_shear(theta: f64) -> Result<Builtin> {
        if !(0.0..std::f64::consts::TAU).contains(&theta) {
            return Err(Error::OutOfRange { what: "shear angle θ (0 ≤ θ < 2π)", value: theta });
        }
        Ok(Builtin::KoebeShear(theta))
    }

    fn apply(&self, x: &Jet) -> Result<Jet> {
        let one = Complex64::new(1.0, 0.0);
        match self {
            Builtin::Identity => Ok(*x),
            Builtin::Koebe => {
                let den = (-*x + one).powi(2)?;
                x.checked_div(&den)
            }
            Builtin::Mobius { a, b, c, d } => {
                let num = x.scale(*a) + *b;
                let den = x.scale(*c) + *d;
                num.checked_div(&den)
            }
            Builtin::TanScaled(c) => x.scale(Complex64::new((c / 2.0).sqrt(), 0.0)).tan(),
            Builtin::KoebeShear(theta) => shear::apply(*theta, x),
        }
    }
}

/// Expression tree over the variable `z`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Var,
    Const(Complex64),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    IntPow(Box<Expr>, i32),
    Func(Func, Box<Expr>),
    Builtin(Builtin),
    /// `outer(inner(z))`
    Compose(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn constant(c: Complex64) -> Expr {
        Expr::Const(c)
    }

    pub fn real(x: f64) -> Expr {
        Expr::Const(Complex64::new(x, 0.0))
    }

    pub fn koebe() -> Expr {
        Expr::Builtin(Builtin::Koebe)
    }

    pub fn identity() -> Expr {
        Expr::Builtin(Builtin::Identity)
    }

    pub fn tan_scaled(c: f64) -> Result<Expr> {
        Ok(Expr::Builtin(Builtin::tan_scaled(c)?))
    }

    pub fn mobius(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Expr> {
        Ok(Expr::Builtin(Builtin::mobius(a, b, c, d)?))
    }

    pub fn koebe_shear(theta: f64) -> Result<Expr> {
        Ok(Expr::Builtin(Builtin::koebe_shear(theta)?))
    }

    pub fn compose(outer: Expr, inner: Expr) -> Expr {
        Expr::Compose(Box::new(outer), Box::new(inner))
    }

    pub fn func(f: Func, arg: Expr) -> Expr {
        Expr::Func(f, Box::new(arg))
    }

    pub fn powi(self, n: i32) -> Expr {
        Expr::IntPow(Box::new(self), n)
    }

    /// Taylor coefficients of the expression at `z` through `order`.
    pub fn eval_jet(&self, z: Complex64, order: usize) -> Result<Jet> {
        let x = Jet::variable(z, order)?;
        self.eval_with(&x)
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval_jet(z, 0)?.value())
    }

    /// Evaluates with the variable bound to an arbitrary jet, which is how
    /// composition is carried out.
    pub fn eval_with(&self, x: &Jet) -> Result<Jet> {
        let base = x.base_point();
        let order = x.order();
        Ok(match self {
            Expr::Var => *x,
            Expr::Const(c) => Jet::constant(base, *c, order)?,
            Expr::Add(a, b) => a.eval_with(x)? + b.eval_with(x)?,
            Expr::Sub(a, b) => a.eval_with(x)? - b.eval_with(x)?,
            Expr::Mul(a, b) => a.eval_with(x)? * b.eval_with(x)?,
            Expr::Div(a, b) => a.eval_with(x)?.checked_div(&b.eval_with(x)?)?,
            Expr::Neg(a) => -a.eval_with(x)?,
            Expr::IntPow(a, n) => a.eval_with(x)?.powi(*n)?,
            Expr::Func(f, a) => f.apply(&a.eval_with(x)?)?,
            Expr::Builtin(b) => b.apply(x)?,
            Expr::Compose(outer, inner) => outer.eval_with(&inner.eval_with(x)?)?,
        })
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::Div(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

/// Formats a complex number in the literal form accepted inside
/// `mobius(...)` and by [`parse_complex`]: `1.5`, `-2i`, `0.3+0.1i`.
pub fn format_complex(c: Complex64) -> String {
    let re = if c.re == 0.0 { 0.0 } else { c.re };
    let im = if c.im == 0.0 { 0.0 } else { c.im };
    match (re == 0.0, im == 0.0) {
        (_, true) => format!("{re}"),
        (true, false) => format!("{im}i"),
        (false, false) if im < 0.0 => format!("{re}-{}i", -im),
        (false, false) => format!("{re}+{im}i"),
    }
}

fn fmt_const(c: Complex64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let lit = format_complex(c);
    let bare = (c.im == 0.0 && c.re >= 0.0) || (c.re == 0.0 && c.im > 0.0);
    if bare {
        write!(f, "{lit}")
    } else {
        write!(f, "({lit})")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var => write!(f, "z"),
            Expr::Const(c) => fmt_const(*c, f),
            // a bare constant after `+`/`-` would turn "(0 - 2i)" into one literal
            Expr::Add(a, b) if matches!(**b, Expr::Const(_)) => write!(f, "({a} + ({b}))"),
            Expr::Sub(a, b) if matches!(**b, Expr::Const(_)) => write!(f, "({a} - ({b}))"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            // "-(a)" keeps "(-1)" (a literal) distinct from the negation of 1
            Expr::Neg(a) => write!(f, "-({a})"),
            Expr::IntPow(a, n) => match **a {
                Expr::Neg(_) | Expr::IntPow(..) => write!(f, "({a})^{n}"),
                _ => write!(f, "{a}^{n}"),
            },
            Expr::Func(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Builtin(b) => match b {
                Builtin::Koebe => write!(f, "koebe"),
                Builtin::Identity => write!(f, "identity"),
                Builtin::Mobius { a, b, c, d } => write!(
                    f,
                    "mobius({}, {}, {}, {})",
                    format_complex(*a),
                    format_complex(*b),
                    format_complex(*c),
                    format_complex(*d)
                ),
                Builtin::TanScaled(c) => write!(f, "tan_scaled({c})"),
                Builtin::KoebeShear(theta) => write!(f, "koebe_shear({theta})"),
            },
            Expr::Compose(outer, inner) => write!(f, "compose({outer}, {inner})"),
        }
    }
}
