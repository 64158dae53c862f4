use thiserror::Error;

/// Errors raised by the matrix, geometry and optimisation layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must be square with n >= 1 (got {rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("matrix is not Hermitian: relative residual {residual:.3e}")]
    NotHermitian { residual: f64 },

    #[error("matrix is not positive definite: eigenvalue {eigenvalue:.6e}")]
    NotPositiveDefinite { eigenvalue: f64 },

    #[error("matrix function undefined for eigenvalue {eigenvalue:.6e}")]
    SpectralDomain { eigenvalue: f64 },

    #[error("matrix function overflows: exponent {eigenvalue:.6e} out of range")]
    Overflow { eigenvalue: f64 },

    #[error("eigensolver did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("tangent vectors are anchored at different base points")]
    BaseMismatch,

    #[error("parameter vector has length {found}, system expects {expected}")]
    ParameterCount { expected: usize, found: usize },

    #[error("parameters {0:?} lie outside the system domain")]
    DomainExit(Vec<f64>),

    #[error("metric matrix is singular or ill-conditioned (condition number {condition:.3e})")]
    MetricSingular { condition: f64 },

    #[error("target is not on the output submanifold (chart residual {residual:.3e}); use the natural-gradient controller")]
    OffManifold { residual: f64 },

    #[error("system has no chart inverse; the Riemannian controller needs one to report inputs")]
    MissingChartInverse,

    #[error("input matrix {index} is not Toeplitz (residual {residual:.3e})")]
    NotToeplitz { index: usize, residual: f64 },

    #[error("at least one input matrix is required")]
    EmptyInput,

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
