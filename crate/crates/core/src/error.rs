use thiserror::Error;

/// Errors raised by the cone calculus.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is singular (pivot {pivot:e} below threshold {threshold:e})")]
    Singular { pivot: f64, threshold: f64 },

    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not positive definite (lambda_min {lambda_min:e}, threshold {threshold:e})")]
    NotPositive { lambda_min: f64, threshold: f64 },

    #[error("matrix is not in the image of the quaternionic embedding (residual {residual:e})")]
    NotInImage { residual: f64 },

    #[error("embedded eigenvalues do not pair up (gap {gap:e})")]
    UnpairedEigenvalues { gap: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("matrix is not J-Hermitian (residual {residual:e})")]
    NotJHermitian { residual: f64 },

    #[error("matrix is not J-positive (lambda_min of JX {lambda_min:e}, threshold {threshold:e})")]
    NotJPositive { lambda_min: f64, threshold: f64 },

    #[error("signature mismatch: ({0}, {1}) vs ({2}, {3})")]
    SignatureMismatch(usize, usize, usize, usize),

    #[error("invalid signature ({p}, {q}): dimension must be at least 1")]
    InvalidSignature { p: usize, q: usize },

    #[error("weight {0} outside [0, 1]")]
    WeightOutOfRange(f64),

    #[error("exponent {0} outside [-32, 32]")]
    ExponentOutOfRange(f64),

    #[error("finite-difference step {0:e} is below 1e-7")]
    StepTooSmall(f64),

    #[error("evaluation point {t} must lie in (h, 1 - h) for h = {h}")]
    PointOutOfRange { t: f64, h: f64 },

    #[error("matrices do not commute for the bullet product (commutator norm {0:e})")]
    NotBulletCommuting(f64),

    #[error("premise violated: {0}")]
    PremiseViolated(String),

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
