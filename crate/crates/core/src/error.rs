use thiserror::Error;

/// Every failure the library can report.
///
/// Variants whose name ends in a guard description (`DegenerateDenominator`,
/// `NotSelfMap`, `DegenerateNormalization`) are numerical guards: the input was
/// well formed but the computation left the regime where its output means
/// anything.
#[derive(Debug, Error)]
pub enum Error {
    #[error("no intervals")]
    NoIntervals,
    #[error("not a weight: sample {index} is {value}")]
    NotAWeight { index: usize, value: f64 },
    #[error("weight must be strictly positive, sample {index} is {value}")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("zero-mass interval centred at {center} (half-length {half})")]
    ZeroMass { center: f64, half: f64 },
    #[error("exponent p = {0} must exceed 1")]
    InvalidExponent(f64),
    #[error("clamp undefined for complex-valued input (sample {0} has nonzero imaginary part)")]
    ComplexClamp(usize),
    #[error("mollifier width must be positive, got {0}")]
    InvalidWidth(f64),
    #[error("invalid sampled function: {0}")]
    InvalidFunction(String),
    #[error("evaluation window [{lo}, {hi}] leaves the domain [{x_min}, {x_max}] of an explicit-handle function")]
    OutsideDomain {
        lo: f64,
        hi: f64,
        x_min: f64,
        x_max: f64,
    },
    #[error("height y = {0} must be positive")]
    NonPositiveHeight(f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid kernel set: {0}")]
    InvalidKernelSet(String),
    #[error("degenerate normalization: |int_0^1 e^u| = {0}")]
    DegenerateNormalization(f64),
    #[error("degenerate denominator |beta_y * e^u| = {value:e} at ({x}, {y})")]
    DegenerateDenominator { x: f64, y: f64, value: f64 },
    #[error("not a self-map of the upper half-plane: Im F = {value:e} at ({x}, {y})")]
    NotSelfMap { x: f64, y: f64, value: f64 },
    #[error("empty field")]
    EmptyField,
    #[error("field content is {found}, expected {expected}")]
    WrongContent {
        expected: &'static str,
        found: &'static str,
    },
    #[error("input is not periodic: {0}")]
    NonPeriodic(String),
    #[error("r0 = {0} outside (e^-pi, 1)")]
    InvalidRadius(f64),
    #[error("invalid constants: {0}")]
    InvalidConstants(String),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Name of the numerical guard that tripped, if this error is one.
    pub fn guard_name(&self) -> Option<&'static str> {
        match self {
            Error::DegenerateDenominator { .. } => Some("degenerate-denominator"),
            Error::NotSelfMap { .. } => Some("not-self-map"),
            Error::DegenerateNormalization(_) => Some("degenerate-normalization"),
            Error::ZeroMass { .. } => Some("zero-mass"),
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
