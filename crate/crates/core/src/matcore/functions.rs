//! Functional calculus on Hermitian matrices.

use super::eigen::Field;
use super::Matrix;
use crate::{Error, Result};

/// Default relative threshold for strict positivity.
pub const POSITIVITY_TOL: f64 = 1e-10;

/// `f(X) = U f(diag) U*` for Hermitian `X`.
pub fn matrix_function<T: Field>(x: &Matrix<T>, f: impl Fn(f64) -> f64) -> Result<Matrix<T>> {
    Ok(T::hermitian_apply(x, &f)?.0)
}

pub fn mat_exp_h<T: Field>(x: &Matrix<T>) -> Result<Matrix<T>> {
    matrix_function(x, f64::exp)
}

/// Applies `f` to a positive definite matrix; returns `f(X)` and the eigenvalues of `X`.
///
/// Eigenvalues at or below the threshold are rejected, never clamped.
pub fn pd_function<T: Field>(x: &Matrix<T>, f: impl Fn(f64) -> f64) -> Result<(Matrix<T>, Vec<f64>)> {
    let (fx, eigenvalues) = T::hermitian_apply(x, &f)?;
    check_positive_spectrum(&eigenvalues, POSITIVITY_TOL)?;
    Ok((fx, eigenvalues))
}

/// As [`pd_function`] for matrices already certified positive definite.
///
/// Only eigenvalues that come out nonpositive in floating point are rejected.
pub(crate) fn certified_pd_function<T: Field>(x: &Matrix<T>, f: impl Fn(f64) -> f64) -> Result<(Matrix<T>, Vec<f64>)> {
    let (fx, eigenvalues) = T::hermitian_apply(x, &f)?;
    check_positive_spectrum(&eigenvalues, 0.0)?;
    Ok((fx, eigenvalues))
}

pub(crate) fn check_positive_spectrum(eigenvalues: &[f64], tol: f64) -> Result<()> {
    let norm = eigenvalues.iter().fold(0f64, |m, l| m.max(l.abs()));
    let lambda_min = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let threshold = tol * norm.max(1.0);
    if lambda_min <= threshold {
        return Err(Error::NotPositive { lambda_min, threshold });
    }
    Ok(())
}

pub fn mat_log_pd<T: Field>(x: &Matrix<T>) -> Result<Matrix<T>> {
    Ok(pd_function(x, f64::ln)?.0)
}

pub fn mat_pow_pd<T: Field>(x: &Matrix<T>, t: f64) -> Result<Matrix<T>> {
    Ok(pd_function(x, |l| l.powf(t))?.0)
}

pub fn mat_sqrt_pd<T: Field>(x: &Matrix<T>) -> Result<Matrix<T>> {
    Ok(pd_function(x, f64::sqrt)?.0)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn lambda_min<T: Field>(x: &Matrix<T>) -> Result<f64> {
    Ok(T::eigenvalues(x)?.last().copied().unwrap_or(f64::INFINITY))
}

/// `lambda_min(X) > tol * max(1, ||X||_2)`.
pub fn is_positive_definite<T: Field>(x: &Matrix<T>, tol: f64) -> Result<bool> {
    let ev = T::eigenvalues(x)?;
    Ok(check_positive_spectrum(&ev, tol).is_ok())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::psi::{psi_matrix, structural_residual};
    use crate::scalars::{Quaternion, Scalar};
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian<T: Scalar>(n: usize, seed: u64, norm: f64) -> Matrix<T> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = Matrix::from_fn(n, n, |_, _| T::sample_normal(&mut rng)).hermitian_part();
        let f = h.frobenius_norm().max(1e-12);
        h.scale(norm / f)
    }

    fn random_pd<T: Field>(n: usize, seed: u64) -> Matrix<T> {
        mat_exp_h(&random_hermitian::<T>(n, seed, 2.0)).unwrap()
    }

    fn rel(a: &Matrix<impl Scalar>, b: &Matrix<impl Scalar>, diff: f64) -> f64 {
        diff / a.frobenius_norm().max(b.frobenius_norm()).max(1.0)
    }

    #[test]
    fn diagonal_examples() {
        let s = mat_sqrt_pd(&Matrix::<f64>::from_real_diag(&[4.0, 9.0])).unwrap();
        assert!((&s - &Matrix::from_real_diag(&[2.0, 3.0])).frobenius_norm() < 1e-15);
        let p = mat_pow_pd(&Matrix::<f64>::from_real_diag(&[16.0, 81.0]), 0.25).unwrap();
        assert!((&p - &Matrix::from_real_diag(&[2.0, 3.0])).frobenius_norm() < 1e-14);
    }

    #[test]
    fn positivity_examples() {
        assert!(is_positive_definite(&Matrix::<f64>::identity(3), POSITIVITY_TOL).unwrap());
        let a = Matrix::from_rows(vec![vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        assert!(is_positive_definite(&a, POSITIVITY_TOL).unwrap());
        let b = Matrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(!is_positive_definite(&b, POSITIVITY_TOL).unwrap());
        let ns = Matrix::from_rows(vec![vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(is_positive_definite(&ns, POSITIVITY_TOL), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn boundary_is_rejected_not_clamped() {
        let x = Matrix::<f64>::from_real_diag(&[1.0, 0.0]);
        assert!(matches!(mat_log_pd(&x), Err(Error::NotPositive { .. })));
        assert!(matches!(mat_sqrt_pd(&x), Err(Error::NotPositive { .. })));
        let y = Matrix::<f64>::from_real_diag(&[1.0, -1.0]);
        assert!(mat_exp_h(&y).is_ok());
        assert!(matches!(mat_pow_pd(&y, 0.5), Err(Error::NotPositive { .. })));
    }

    fn log_exp_round_trip<T: Field>(seed: u64) {
        let h = random_hermitian::<T>(3, seed, 3.0);
        let back = mat_log_pd(&mat_exp_h(&h).unwrap()).unwrap();
        assert!((&back - &h).frobenius_norm() <= 1e-9 * h.frobenius_norm().max(1.0));
    }

    #[test]
    fn quaternion_results_stay_in_image() {
        let x = random_pd::<Quaternion>(3, 17);
        for f in [mat_sqrt_pd(&x).unwrap(), mat_log_pd(&x).unwrap(), mat_pow_pd(&x, -1.3).unwrap()] {
            assert!(structural_residual(&psi_matrix(&f)).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn quaternion_calculus_matches_eigenvectors() {
        // psi route against the quaternionic eigenvector route
        let x = random_hermitian::<Quaternion>(4, 23, 2.0);
        let via_psi = mat_exp_h(&x).unwrap();
        let via_vectors = Quaternion::eigh(&x).unwrap().apply(f64::exp);
        assert!((&via_psi - &via_vectors).frobenius_norm() < 1e-10);
        let embedded = mat_exp_h(&psi_matrix(&x)).unwrap();
        assert!((&psi_matrix(&via_psi) - &embedded).frobenius_norm() < 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn round_trip_all_fields(seed in any::<u64>()) {
            log_exp_round_trip::<f64>(seed);
            log_exp_round_trip::<Complex64>(seed);
            log_exp_round_trip::<Quaternion>(seed);
        }

        #[test]
        fn power_law(seed in any::<u64>(), s in -2.0..2.0f64, t in -2.0..2.0f64) {
            let x = random_pd::<Complex64>(3, seed);
            let lhs = mat_pow_pd(&mat_pow_pd(&x, s).unwrap(), t).unwrap();
            let rhs = mat_pow_pd(&x, s * t).unwrap();
            prop_assert!(rel(&lhs, &rhs, (&lhs - &rhs).frobenius_norm()) <= 1e-9);
            let prod = &mat_pow_pd(&x, s).unwrap() * &mat_pow_pd(&x, t).unwrap();
            let sum = mat_pow_pd(&x, s + t).unwrap();
            prop_assert!(rel(&prod, &sum, (&prod - &sum).frobenius_norm()) <= 1e-9);
        }

        #[test]
        fn commuting_product(seed in any::<u64>(), s in -2.0..2.0f64) {
            // polynomials in one Hermitian seed commute
            let h = random_hermitian::<Quaternion>(3, seed, 1.0);
            let id = Matrix::<Quaternion>::identity(3);
            let x = &(&h * &h) + &id;
            let y = &(&h.scale(0.5) + &id.scale(2.0)) + &(&h * &h).scale(0.25);
            let lhs = mat_pow_pd(&(&x * &y), s).unwrap();
            let rhs = &mat_pow_pd(&x, s).unwrap() * &mat_pow_pd(&y, s).unwrap();
            prop_assert!(rel(&lhs, &rhs, (&lhs - &rhs).frobenius_norm()) <= 1e-9);
        }

        #[test]
        fn unitary_congruence(seed in any::<u64>(), t in -2.0..2.0f64) {
            let x = random_pd::<Complex64>(3, seed);
            let u = Complex64::eigh(&random_hermitian::<Complex64>(3, seed ^ 0xabc, 1.0)).unwrap().unitary;
            let lhs = mat_pow_pd(&(&(&u * &x) * &u.adjoint()), t).unwrap();
            let rhs = &(&u * &mat_pow_pd(&x, t).unwrap()) * &u.adjoint();
            prop_assert!(rel(&lhs, &rhs, (&lhs - &rhs).frobenius_norm()) <= 1e-9);
        }
    }

    #[test]
    fn unit_power_is_identity_map() {
        let x = random_pd::<Quaternion>(3, 5);
        let p = mat_pow_pd(&x, 1.0).unwrap();
        assert!((&p - &x).frobenius_norm() < 1e-10);
    }
}
