//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use schwarzkit::expr::{parse, parse_complex, Expr};
use schwarzkit::ode::DEFAULT_SEED;
use schwarzkit::schwarzian::NehariProfile;

#[derive(Debug, Parser)]
#[command(name = "schw", version, about = "Schwarzian derivatives, valence bounds and harmonic lifts on the unit disk")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub group: Group,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Output format. Sweeps print CSV for `text` as well.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Group {
    /// Schwarzian derivatives of analytic maps.
    #[command(subcommand)]
    Schw(SchwCmd),
    /// Pseudohyperbolic geometry.
    #[command(subcommand)]
    Geom(GeomCmd),
    /// The equation u'' + ψu = 0 along segments.
    #[command(subcommand)]
    Ode(OdeCmd),
    /// Preimage counts and valence bounds.
    #[command(subcommand)]
    Valence(ValenceCmd),
    /// Harmonic maps h + conj(g) with dilatation q².
    #[command(subcommand)]
    Harmonic(HarmonicCmd),
    /// The acceptance criteria.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

fn expr_arg(text: &str) -> Result<Expr, String> {
    parse(text).map_err(|e| {
        let offset = match &e {
            schwarzkit::Error::Syntax { offset, .. } | schwarzkit::Error::UnknownIdentifier { offset, .. } => Some(*offset),
            _ => None,
        };
        match offset {
            Some(at) => format!("{e}\n  {text}\n  {}^", " ".repeat(text[..at.min(text.len())].chars().count())),
            None => e.to_string(),
        }
    })
}

fn complex_arg(text: &str) -> Result<Complex64, String> {
    parse_complex(text).map_err(|e| e.to_string())
}

fn profile_arg(text: &str) -> Result<NehariProfile, String> {
    text.parse()
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Radial samples of the norm grid.
    #[arg(long, default_value_t = 400)]
    pub radial: usize,
    /// Angular samples of the norm grid.
    #[arg(long, default_value_t = 400)]
    pub angular: usize,
    /// Skip the coordinate-ascent refinement.
    #[arg(long)]
    pub no_refine: bool,
}

#[derive(Debug, Clone, Args)]
pub struct MapArgs {
    /// Analytic part h.
    #[arg(long, value_parser = expr_arg)]
    pub h: Expr,
    /// Square root q of the dilatation; 0 gives the analytic map h.
    #[arg(long, value_parser = expr_arg, default_value = "0")]
    pub q: Expr,
}

#[derive(Debug, Clone, Args)]
pub struct SegmentArgs {
    /// Potential ψ.
    #[arg(long, value_parser = expr_arg)]
    pub psi: Expr,
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    pub from: Complex64,
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    pub to: Complex64,
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true, default_value = "0")]
    pub u0: Complex64,
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true, default_value = "1")]
    pub du0: Complex64,
    #[arg(long, default_value_t = 20_000)]
    pub steps: usize,
}

#[derive(Debug, Subcommand)]
pub enum SchwCmd {
    /// Sf at a point.
    Eval {
        #[arg(long, value_parser = expr_arg)]
        f: Expr,
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        z: Complex64,
    },
    /// Lower bound for sup (1-|z|²)²|Sf(z)|.
    Norm {
        #[arg(long, value_parser = expr_arg)]
        f: Expr,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Compare |Sf| with 2p(|z|) on seeded random samples.
    NehariCheck {
        #[arg(long, value_parser = expr_arg)]
        f: Expr,
        /// nehari_quadratic, nehari_constant or pokornyi.
        #[arg(long, value_parser = profile_arg)]
        profile: NehariProfile,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        /// Samples are drawn from |z| < radius.
        #[arg(long, default_value_t = 0.99)]
        radius: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum GeomCmd {
    /// Pseudohyperbolic and hyperbolic distance.
    Rho {
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        a: Complex64,
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        b: Complex64,
    },
    /// Euclidean center and radius of a pseudohyperbolic disk.
    Disk {
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        alpha: Complex64,
        #[arg(long)]
        r: f64,
    },
    /// Geodesic rectangles covering the outer annulus.
    Rectangles {
        #[arg(long = "C")]
        c: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum OdeCmd {
    /// Integrate along a segment and locate the zeros.
    Segment(SegmentArgs),
    /// Check v'' + |ψ|v ≥ 0 for v = |u|.
    Lemma1(SegmentArgs),
    /// Zeros of (1-x²)P_n'.
    Legendre {
        #[arg(long)]
        n: usize,
        /// Also integrate y'' + n(n+1)/(1-x²) y = 0 and count sign changes.
        #[arg(long)]
        ode: bool,
    },
    /// Random trials on a Nehari profile; each should have at most one zero.
    Disconjugacy {
        #[arg(long, value_parser = profile_arg)]
        profile: NehariProfile,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum ValenceCmd {
    /// Count preimages of w in |z| < r by the argument principle.
    Count {
        #[arg(long, value_parser = expr_arg)]
        f: Expr,
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true, default_value = "0")]
        w: Complex64,
        #[arg(long, default_value_t = 0.99)]
        r: f64,
        #[arg(long, default_value_t = schwarzkit::valence::DEFAULT_NODES)]
        nodes: usize,
        /// Also check separation and count against the bounds for this C.
        #[arg(long = "C")]
        c: Option<f64>,
    },
    /// The valence bound (1 + √(2C)/π)² and its integer part.
    Bound {
        #[arg(long = "C")]
        c: f64,
    },
    /// Zeros of tan_scaled(C) on the diameter.
    TanCensus {
        #[arg(long = "C")]
        c: f64,
    },
    /// The annulus-and-rectangle bound for one C.
    Breakdown {
        #[arg(long = "C")]
        c: f64,
    },
    /// Breakdowns on a geometric grid of C values, as CSV.
    Sweep {
        #[arg(long, default_value_t = 4.0)]
        c_min: f64,
        #[arg(long, default_value_t = 1024.0)]
        c_max: f64,
        #[arg(long, default_value_t = 9)]
        points: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum HarmonicCmd {
    /// Sf = 2(σ_zz - σ_z²) at a point.
    Schwarzian {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        z: Complex64,
    },
    /// Lower bound for sup (1-|z|²)²|Sf(z)|.
    Norm {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// The Koebe shear with dilatation e^{iθ}z².
    Shear {
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        z: Option<Complex64>,
    },
    /// The minimal-surface lift at a point.
    Lift {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        z: Complex64,
    },
    /// |Sf| + e^{2σ}|K| at a point.
    Criterion {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        z: Complex64,
        /// Check the value against this bound.
        #[arg(long = "C")]
        c: Option<f64>,
    },
    /// Preimages of w under h + conj(g) by seeded Newton iteration.
    Preimages {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        w: Complex64,
        /// Compare the separation with π√(2/C).
        #[arg(long = "C")]
        c: Option<f64>,
        #[arg(long, default_value_t = 24)]
        radial: usize,
        #[arg(long, default_value_t = 48)]
        angular: usize,
        #[arg(long, default_value_t = 0.99)]
        radius: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum VerifyCmd {
    /// Run every acceptance criterion and print the table.
    All,
}
