//! Dense matrices over R, C and H with a Hermitian spectral calculus.

pub mod eigen;
pub mod functions;
mod matrix;
pub mod psi;

pub use eigen::{jacobi_eigh, Field, SpectralDecomposition};
pub use functions::{
    is_positive_definite, lambda_min, mat_exp_h, mat_log_pd, mat_pow_pd, mat_sqrt_pd, matrix_function, pd_function,
    POSITIVITY_TOL,
};
pub use matrix::{scale_of, Matrix};
pub use psi::{j2n, psi_inverse, psi_matrix, structural_residual};
