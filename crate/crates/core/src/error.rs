use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid space parameters (n = {n}, d = {d}): need n >= 1 and d >= 2")]
    InvalidParams { n: usize, d: usize },

    #[error("polynomials live in different spaces: ({0}, {1}) vs ({2}, {3})")]
    SpaceMismatch(usize, usize, usize, usize),

    #[error("expected {expected} coefficients, got {got}")]
    CoefficientLength { expected: usize, got: usize },

    #[error("expected a vector of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vector is not of unit norm (norm = {0})")]
    NotUnit(f64),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("operation requires degree 2, got degree {0}")]
    NotQuadratic(usize),

    #[error("{name} = {value} is outside the admissible range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("zero polynomial has no rank-one approximation")]
    ZeroPolynomial,

    #[error("normal vector has a component of size {0:e} along x0^d or the tangent space")]
    NotNormal(f64),

    #[error(
        "quadrature did not reach the requested tolerance (estimate {value}, error {error:e})"
    )]
    Quadrature { value: f64, error: f64 },

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn out_of_range(name: &'static str, value: f64, range: &'static str) -> Self {
        Error::OutOfRange { name, value, range }
    }
}
