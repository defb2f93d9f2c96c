use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid generator: {0}")]
    InvalidSpec(String),
    #[error("derivative order {order} exceeds the supported maximum {max}")]
    DerivativeOrder { order: usize, max: usize },
    #[error("tolerance unachievable: {0}")]
    ToleranceUnachievable(String),
    #[error("invalid point set: {0}")]
    InvalidSet(String),
    #[error("exact periodic density requested for a non-periodic set")]
    NotPeriodic,
    #[error("period {0} is not an integer")]
    NonIntegerPeriod(f64),
    #[error("set height {height} exceeds the configured derivative limit {max}")]
    HeightExceedsSmoothness { height: usize, max: usize },
    #[error("integer-shift symbol degenerates: min {min:e}, max {max:e}")]
    DegenerateSymbol { min: f64, max: f64 },
    #[error("sampling operator is empty")]
    EmptyOperator,
    #[error("Riesz lower bound {0:e} is not positive")]
    DegenerateRiesz(f64),
    #[error("operator is not a frame (lower bound {0:e})")]
    NotAFrame(f64),
    #[error("iteration did not converge after {iterations} steps (residual {residual:e})")]
    MaxIterExceeded { iterations: usize, residual: f64 },
    #[error("sample vector has length {got}, operator has {expected} rows")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("evaluation point {0} is within 1e-9 of a pole")]
    PoleProximity(num_complex::Complex64),
    #[error("{0} is not a zero of the requested multiplicity")]
    NotAZero(f64),
    #[error("zero near {0} exceeds the maximal multiplicity")]
    MultiplicityOverflow(f64),
    #[error("contour passes too close to a zero or pole")]
    ContourTooClose,
    #[error("winding number {0} is not close to an integer")]
    NonIntegerWinding(f64),
    #[error("a zero or pole lies on the Jensen circle")]
    ZeroOnContour,
    #[error("window basis is singular")]
    SingularBasis,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
        Error::Parse { line, msg: e.to_string() }
    }
}
