//! Numerical toolkit for Schwarzian derivatives of analytic and harmonic
//! maps of the unit disk, with valence bounds, Sturm-comparison checks and
//! minimal-surface lift criteria.

pub mod check;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod harmonic;
pub mod norm;
pub mod ode;
pub mod quad;
pub mod schwarzian;
pub mod valence;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
