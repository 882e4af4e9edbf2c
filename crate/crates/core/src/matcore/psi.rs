//! The embedding of quaternionic matrices into complex matrices of twice the size.

use num_complex::Complex64;

use super::Matrix;
use crate::scalars::{Quaternion, Scalar};
use crate::{Error, Result};

/// `Psi(A + B j) = [[A, B], [-conj(B), conj(A)]]`.
pub fn psi_matrix(x: &Matrix<Quaternion>) -> Matrix<Complex64> {
    let (r, c) = (x.rows(), x.cols());
    Matrix::from_fn(2 * r, 2 * c, |i, j| {
        let (ii, jj) = (i % r, j % c);
        let (z1, z2) = x[(ii, jj)].complex_pair();
        match (i < r, j < c) {
            (true, true) => z1,
            (true, false) => z2,
            (false, true) => -z2.conj(),
            (false, false) => z1.conj(),
        }
    })
}

/// `J_{2n} = [[0, Id], [-Id, 0]]`, the image of `j * Id_n`.
pub fn j2n(n: usize) -> Matrix<Complex64> {
    Matrix::from_fn(2 * n, 2 * n, |i, j| {
        if i < n && j == i + n {
            Complex64::new(1.0, 0.0)
        } else if i >= n && j + n == i {
            Complex64::new(-1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `||M J_{2n} - J_{2n} conj(M)||_F`; zero exactly on the image of [`psi_matrix`].
pub fn structural_residual(m: &Matrix<Complex64>) -> Result<f64> {
    let size = m.dim()?;
    if size % 2 != 0 {
        return Err(Error::NotInImage { residual: f64::INFINITY });
    }
    let j = j2n(size / 2);
    let conj = m.map(|z| z.conj());
    Ok((&(m * &j) - &(&j * &conj)).frobenius_norm())
}

/// Reads `A` and `B` off the upper blocks of an image matrix.
pub fn psi_inverse(m: &Matrix<Complex64>) -> Result<Matrix<Quaternion>> {
    let residual = structural_residual(m)?;
    if residual > 1e-8 * m.frobenius_norm().max(1.0) {
        return Err(Error::NotInImage { residual });
    }
    let n = m.rows() / 2;
    Ok(Matrix::from_fn(n, n, |i, j| Quaternion::from_complex_pair(m[(i, j)], m[(i, j + n)])))
}

/// The complex vector `(u, w)` corresponding to the quaternionic vector `u - conj(w) j`.
pub(crate) fn quaternion_vector_from_embedded(v: &[Complex64]) -> Vec<Quaternion> {
    let n = v.len() / 2;
    (0..n).map(|i| Quaternion::from_complex_pair(v[i], -v[i + n].conj())).collect()
}

impl Matrix<Quaternion> {
    pub fn psi(&self) -> Matrix<Complex64> {
        psi_matrix(self)
    }
}

impl Matrix<Complex64> {
    pub fn psi_inverse(&self) -> Result<Matrix<Quaternion>> {
        psi_inverse(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn quaternion_scalar_psi_is_consistent(q: Quaternion) -> bool {
        let m = psi_matrix(&Matrix::from_vec(1, 1, vec![q]).unwrap());
        let s = q.psi();
        (0..2).all(|i| (0..2).all(|j| m[(i, j)] == s[i][j]))
    }

    fn random(n: usize, seed: u64) -> Matrix<Quaternion> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::from_fn(n, n, |_, _| Quaternion::sample_normal(&mut rng))
    }

    #[test]
    fn identity_and_scalar_j() {
        assert_eq!(psi_matrix(&Matrix::identity(3)), Matrix::identity(6));
        let jm = Matrix::from_vec(1, 1, vec![Quaternion::J]).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        assert_eq!(psi_matrix(&jm), Matrix::from_rows(vec![vec![zero, one], vec![-one, zero]]).unwrap());
        for q in [Quaternion::new(0.2, -1.0, 3.0, 0.5), Quaternion::K] {
            assert!(quaternion_scalar_psi_is_consistent(q));
        }
    }

    #[test]
    fn homomorphism_and_adjoint() {
        let x = random(3, 1);
        let y = random(3, 2);
        let lhs = psi_matrix(&(&x * &y));
        let rhs = &psi_matrix(&x) * &psi_matrix(&y);
        assert!((&lhs - &rhs).frobenius_norm() < 1e-12);
        assert!((&psi_matrix(&x.adjoint()) - &psi_matrix(&x).adjoint()).frobenius_norm() < 1e-15);
        assert!(structural_residual(&psi_matrix(&x)).unwrap() < 1e-14);
    }

    #[test]
    fn inverse_commutes_with_embedding() {
        let x = random(4, 3);
        let lhs = psi_matrix(&x.inverse().unwrap());
        let rhs = psi_matrix(&x).inverse().unwrap();
        assert!((&lhs - &rhs).frobenius_norm() < 1e-10);
    }

    #[test]
    fn psi_inverse_cases() {
        assert_eq!(psi_inverse(&Matrix::identity(4)).unwrap(), Matrix::identity(2));
        let x = random(3, 4);
        assert_eq!(psi_inverse(&psi_matrix(&x)).unwrap(), x);
        let jd = psi_inverse(&j2n(3)).unwrap();
        let expected = Matrix::from_fn(3, 3, |i, j| if i == j { Quaternion::J } else { Quaternion::default() });
        assert_eq!(jd, expected);
        let mut bad = Matrix::<Complex64>::identity(2);
        bad[(0, 0)] = Complex64::new(2.0, 0.0);
        assert!(matches!(psi_inverse(&bad), Err(Error::NotInImage { .. })));
    }

    #[test]
    fn embedded_vector_map_intertwines() {
        // X x corresponds to Psi(X) (u, w) under x = u - conj(w) j
        let x = random(3, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let v: Vec<Complex64> = (0..6).map(|_| Complex64::sample_normal(&mut rng)).collect();
        let lhs = x.mat_vec(&quaternion_vector_from_embedded(&v));
        let rhs = quaternion_vector_from_embedded(&psi_matrix(&x).mat_vec(&v));
        for (a, b) in lhs.iter().zip(&rhs) {
            assert!((*a - *b).norm() < 1e-12);
        }
    }
}
