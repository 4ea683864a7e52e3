use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("variable index {index} out of range for chart dimension {dim}")]
    VariableOutOfRange { index: usize, dim: usize },
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("jet order {requested} exceeds supported maximum {max}")]
    OrderUnsupported { requested: usize, max: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("metric is singular at {point:?}")]
    SingularMetric { point: Vec<f64> },
    #[error("signature mismatch at {point:?}: expected {expected:?}, found {found:?}")]
    Signature {
        point: Vec<f64>,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("ODE integration failed: {0}")]
    Ode(String),
    #[error("conjugate point at u = {u}: det E = {det:e}")]
    ConjugatePoint { u: f64, det: f64 },
    #[error("adapted-coordinate shape violated at component {component} at probe {probe:?} (value {value:e})")]
    Shape {
        component: String,
        probe: Vec<f64>,
        value: f64,
    },
    #[error("central curve is not a geodesic: residual {residual:e} at {probe:?}")]
    GeodesicResidual { probe: Vec<f64>, residual: f64 },
    #[error("ill-conditioned eigenproblem (condition estimate {0:e})")]
    IllConditioned(f64),
    #[error("complex spectrum: eigenvalue {re} + {im}i is off the real axis")]
    ComplexSpectrum { re: f64, im: f64 },
    #[error("eigenvalue iteration did not converge")]
    EigenNoConvergence,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("root finding failed: {0}")]
    RootFinding(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("degenerate frame: {0}")]
    DegenerateFrame(String),
    #[error("I/O error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Invalid(format!("json: {e}"))
    }
}
