//! Pass/fail records shared by reports and the verification suite.

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub bound: f64,
    pub tolerance: f64,
}

impl Check {
    /// `measured ≤ bound + tolerance`.
    pub fn at_most(name: impl Into<String>, measured: f64, bound: f64, tolerance: f64) -> Check {
        Check { name: name.into(), pass: measured <= bound + tolerance, measured, bound, tolerance }
    }

    /// `measured ≥ bound - tolerance`.
    pub fn at_least(name: impl Into<String>, measured: f64, bound: f64, tolerance: f64) -> Check {
        Check { name: name.into(), pass: measured >= bound - tolerance, measured, bound, tolerance }
    }

    /// `|measured - target| ≤ tolerance`.
    pub fn near(name: impl Into<String>, measured: f64, target: f64, tolerance: f64) -> Check {
        Check { name: name.into(), pass: (measured - target).abs() <= tolerance, measured, bound: target, tolerance }
    }

    /// A yes/no condition, reported as `1` or `0` against the bound `1`.
    pub fn holds(name: impl Into<String>, pass: bool) -> Check {
        Check { name: name.into(), pass, measured: if pass { 1.0 } else { 0.0 }, bound: 1.0, tolerance: 0.0 }
    }
}
