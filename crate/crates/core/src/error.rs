use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("degenerate mobius map: ad - bc = 0")]
    DegenerateMobius,

    #[error("pole encountered at {at}")]
    Pole { at: Complex64 },

    #[error("branch cut: {func} evaluated at nonpositive real argument {arg}")]
    Branch { func: &'static str, arg: Complex64 },

    #[error("jet order {0} exceeds the supported maximum of 6")]
    OrderTooLarge(usize),

    #[error("critical point: |f'| = {modulus:e} at {z}")]
    CriticalPoint { z: Complex64, modulus: f64 },

    #[error("dilatation root has |q| = {modulus} >= 1 at {z}")]
    NotOrientationPreserving { z: Complex64, modulus: f64 },

    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: f64 },

    #[error("point {z} lies outside the open unit disk")]
    OutsideDisk { z: Complex64 },

    #[error("every sample was invalid ({skipped} skipped)")]
    NoValidSamples { skipped: usize },

    #[error("step count too small: estimated residual {residual:e} exceeds 1e-6")]
    StepsTooSmall { residual: f64 },

    #[error("zero initial data gives the trivial solution")]
    TrivialInitialData,

    #[error("integration blew up at x = {reached}")]
    BlowUp { reached: f64 },

    #[error("root isolation failed: {0}")]
    Isolation(String),

    #[error("root within {distance:e} of the contour |z| = {radius}; perturb the radius")]
    NearContourRoot { radius: f64, distance: f64 },

    #[error("winding integral residual {residual} did not drop below 0.01 (nodes = {nodes})")]
    WindingNotInteger { residual: f64, nodes: usize },

    #[error("located roots ({roots}) minus poles ({poles}) disagree with winding number {winding}")]
    CountMismatch { winding: i64, roots: usize, poles: usize },

    #[error("radius recurrence stagnated at step {step} (gap {gap:e})")]
    Stagnation { step: usize, gap: f64 },

    #[error("quadrature failed: {0}")]
    Quadrature(String),
}
