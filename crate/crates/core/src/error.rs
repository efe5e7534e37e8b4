use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Every violated plant invariant, in field order.
    #[error("invalid plant: {}", .0.join("; "))]
    InvalidPlant(Vec<String>),

    #[error("evaluation at a pole: |den(s)| = {modulus:e} at s = {re}{im:+}i")]
    PoleEvaluation { re: f64, im: f64, modulus: f64 },

    #[error("conformal map is singular at z = 1")]
    SingularPoint,

    #[error("polynomial is not even in s (odd coefficient {0:e})")]
    NotEven(f64),

    #[error("spectral factorization target has a root on the imaginary axis near {re}{im:+}i")]
    BoundaryRoot { re: f64, im: f64 },

    #[error("spectral factorization target is not positive on the imaginary axis (value {value:e} at omega = {omega})")]
    Indefinite { omega: f64, value: f64 },

    #[error("rational degree {degree} exceeds the supported maximum of {max}")]
    DegreeTooHigh { degree: usize, max: usize },

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("spectral factor residual {0:e} exceeds tolerance")]
    FactorResidual(f64),

    #[error("factorization is not normalized: residual {0:e}")]
    NotNormalized(f64),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("function vanishes on the contour |z| = {radius} (min modulus {min_modulus:e})")]
    ZeroOnContour { radius: f64, min_modulus: f64 },

    #[error("winding numbers did not stabilize over the schedule tail: {0:?}")]
    NotStabilized(Vec<Option<i64>>),

    #[error("non-finite value encountered at {0}")]
    NonFinite(String),

    #[error("inconclusive verdict: {0}")]
    Inconclusive(String),
}
