use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// The traceless part of the matrix vanishes or is nilpotent (exceptional point).
    #[error("degenerate matrix: traceless part has gap {halfgap:e} (scale {scale:e})")]
    DegenerateMatrix { halfgap: f64, scale: f64 },

    #[error("direction is not a bilinear unit vector: |n.n - 1| = {residual:e}")]
    NonUnitDirection { residual: f64 },

    #[error("matrix is defective or too close to an exceptional point ({reason})")]
    DefectiveMatrix { reason: &'static str },

    #[error("energy constraint violated: expected gap {expected}, got {actual}")]
    ConstraintViolated { expected: f64, actual: f64 },

    #[error("invalid energy constraint: omega = {omega}, hbar = {hbar}")]
    InvalidConstraint { omega: f64, hbar: f64 },

    #[error("target state is not normalized: |a|^2 + |b|^2 = {norm_sq}")]
    InvalidTarget { norm_sq: f64 },

    #[error("target has b = 0; no transfer to optimize")]
    DegenerateTarget,

    #[error("grid resolution {0} is below the minimum of 100 points per axis")]
    InvalidGrid(usize),

    #[error("state is not normalized under the chosen metric: <psi|psi> = {norm_sq}")]
    NonNormalizedState { norm_sq: f64 },

    #[error("PT symmetry is broken: discriminant {discriminant:e} <= 0")]
    BrokenPTSymmetry { discriminant: f64 },

    #[error("gamma = {gamma} makes tan(gamma) degenerate")]
    DegenerateGamma { gamma: f64 },

    #[error("metric operator CP is not positive definite (eigenvalue {eigenvalue:e})")]
    NotPositive { eigenvalue: f64 },

    #[error("root finder did not converge after {iterations} iterations (best residual {best_residual:e})")]
    NoConvergence { iterations: usize, best_residual: f64 },

    #[error("target cannot be matched: {reason}")]
    NonAdmissibleTarget { reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
