//! Hermitian spectral decomposition.
//!
//! Real and complex matrices are diagonalised by cyclic Jacobi rotations.
//! Quaternionic matrices go through the complex embedding: the embedded
//! spectrum comes in equal pairs, and quaternionic eigenvectors are read back
//! from the complex ones.

use num_complex::Complex64;

use super::psi::{psi_inverse, psi_matrix, quaternion_vector_from_embedded};
use super::Matrix;
use crate::scalars::{Quaternion, Scalar};
use crate::{Error, Result};

const MAX_SWEEPS: usize = 60;
const OFF_DIAGONAL_TOL: f64 = 1e-14;
const HERMITIAN_TOL: f64 = 1e-10;
const PAIRING_TOL: f64 = 1e-8;

/// `X = U diag(eigenvalues) U*` with `U` unitary and eigenvalues descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition<T> {
    pub unitary: Matrix<T>,
    pub eigenvalues: Vec<f64>,
}

impl<T: Scalar> SpectralDecomposition<T> {
    /// `U f(diag) U*`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Matrix<T> {
        let n = self.eigenvalues.len();
        let u = &self.unitary;
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = T::zero();
                for k in 0..n {
                    acc += u[(i, k)].scale(fl[k]) * u[(j, k)].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> Matrix<T> {
        self.apply(|l| l)
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(f64::INFINITY)
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(f64::NEG_INFINITY)
    }

    /// Spectral norm `max |lambda|`.
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, l| m.max(l.abs()))
    }
}

/// Scalars admitting a Hermitian spectral calculus.
pub trait Field: Scalar {
    fn eigh(x: &Matrix<Self>) -> Result<SpectralDecomposition<Self>>;

    /// `f(X)` for Hermitian `X`, together with the eigenvalues of `X`.
    fn hermitian_apply(x: &Matrix<Self>, f: &dyn Fn(f64) -> f64) -> Result<(Matrix<Self>, Vec<f64>)> {
        let dec = Self::eigh(x)?;
        Ok((dec.apply(f), dec.eigenvalues))
    }

    /// Eigenvalues only.
    fn eigenvalues(x: &Matrix<Self>) -> Result<Vec<f64>> {
        Ok(Self::eigh(x)?.eigenvalues)
    }
}

impl Field for f64 {
    fn eigh(x: &Matrix<f64>) -> Result<SpectralDecomposition<f64>> {
        jacobi_eigh(x)
    }
}

impl Field for Complex64 {
    fn eigh(x: &Matrix<Complex64>) -> Result<SpectralDecomposition<Complex64>> {
        jacobi_eigh(x)
    }
}

impl Field for Quaternion {
    fn eigh(x: &Matrix<Quaternion>) -> Result<SpectralDecomposition<Quaternion>> {
        check_hermitian(x)?;
        let embedded = jacobi_eigh(&psi_matrix(x))?;
        let eigenvalues = pair_eigenvalues(&embedded.eigenvalues)?;
        let unitary = quaternionic_eigenvectors(x, &embedded)?;
        Ok(SpectralDecomposition { unitary, eigenvalues })
    }

    fn hermitian_apply(x: &Matrix<Quaternion>, f: &dyn Fn(f64) -> f64) -> Result<(Matrix<Quaternion>, Vec<f64>)> {
        check_hermitian(x)?;
        let mut embedded = jacobi_eigh(&psi_matrix(x))?;
        let eigenvalues = pair_eigenvalues(&embedded.eigenvalues)?;
        // both members of a pair get the same value so f keeps the image structure
        embedded.eigenvalues = eigenvalues.iter().flat_map(|&l| [l, l]).collect();
        Ok((psi_inverse(&embedded.apply(f))?, eigenvalues))
    }

    fn eigenvalues(x: &Matrix<Quaternion>) -> Result<Vec<f64>> {
        check_hermitian(x)?;
        pair_eigenvalues(&jacobi_eigh(&psi_matrix(x))?.eigenvalues)
    }
}

pub(crate) fn check_hermitian<T: Scalar>(x: &Matrix<T>) -> Result<()> {
    x.dim()?;
    let residual = x.hermitian_residual();
    if residual > HERMITIAN_TOL * x.frobenius_norm().max(1.0) {
        return Err(Error::NotHermitian { residual });
    }
    Ok(())
}

/// Cyclic Jacobi eigensolver for Hermitian matrices over R or C.
///
/// Each rotation first removes the phase of the pivot entry, then applies
/// the real symmetric Jacobi rotation to the resulting real 2x2 block.
pub fn jacobi_eigh<T: Scalar>(x: &Matrix<T>) -> Result<SpectralDecomposition<T>> {
    check_hermitian(x)?;
    let n = x.dim()?;
    let mut a = x.hermitian_part();
    let mut v = Matrix::<T>::identity(n);
    let target = OFF_DIAGONAL_TOL * a.frobenius_norm();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > target {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re()).collect();
    // stable sort keeps the Jacobi output order on ties
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let unitary = Matrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(SpectralDecomposition { unitary, eigenvalues })
}

fn off_diagonal_norm<T: Scalar>(a: &Matrix<T>) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate<T: Scalar>(a: &mut Matrix<T>, v: &mut Matrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.abs();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re();
    let aqq = a[(q, q)].re();
    if mag <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = T::zero();
        a[(q, p)] = T::zero();
        return;
    }
    let phase = apq.scale(1.0 / mag);
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = a.rows();

    // G = [[c, s], [-s conj(e), c conj(e)]] acting on columns p, q
    let pc = phase.conj();
    let g_qp = pc.scale(-s);
    let g_qq = pc.scale(c);
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp.scale(c) + akq * g_qp;
        a[(k, q)] = akp.scale(s) + akq * g_qq;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp.scale(c) + vkq * g_qp;
        v[(k, q)] = vkp.scale(s) + vkq * g_qq;
    }
    // rows: G* M with G*_{pq} = -s e, G*_{qq} = c e
    let gs_pq = phase.scale(-s);
    let gs_qq = phase.scale(c);
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk.scale(c) + gs_pq * aqk;
        a[(q, k)] = apk.scale(s) + gs_qq * aqk;
    }
    a[(p, q)] = T::zero();
    a[(q, p)] = T::zero();
    a[(p, p)] = T::from_real(a[(p, p)].re());
    a[(q, q)] = T::from_real(a[(q, q)].re());
}

/// Halves the multiplicity of each eigenvalue of an embedded quaternionic matrix.
fn pair_eigenvalues(embedded: &[f64]) -> Result<Vec<f64>> {
    let scale = embedded.iter().fold(1f64, |m, l| m.max(l.abs()));
    embedded
        .chunks(2)
        .map(|pair| {
            let gap = (pair[0] - pair[1]).abs();
            if gap > PAIRING_TOL * scale {
                Err(Error::UnpairedEigenvalues { gap })
            } else {
                Ok(0.5 * (pair[0] + pair[1]))
            }
        })
        .collect()
}

fn quaternionic_eigenvectors(
    x: &Matrix<Quaternion>,
    embedded: &SpectralDecomposition<Complex64>,
) -> Result<Matrix<Quaternion>> {
    let n = x.rows();
    let candidates: Vec<Vec<Quaternion>> = (0..2 * n)
        .map(|k| {
            let col: Vec<Complex64> = (0..2 * n).map(|i| embedded.unitary[(i, k)]).collect();
            quaternion_vector_from_embedded(&col)
        })
        .collect();

    // Greedy quaternionic Gram-Schmidt: each embedded eigenvector and its
    // partner span the same quaternionic line, so take the candidate with
    // the largest component outside the span accepted so far.
    let mut basis: Vec<Vec<Quaternion>> = Vec::with_capacity(n);
    let mut used = vec![false; 2 * n];
    while basis.len() < n {
        let mut best: Option<(usize, Vec<Quaternion>, f64)> = None;
        for (k, cand) in candidates.iter().enumerate() {
            if used[k] {
                continue;
            }
            let r = project_out(cand, &basis);
            let norm = vec_norm(&r);
            if best.as_ref().is_none_or(|b| norm > b.2) {
                best = Some((k, r, norm));
            }
        }
        let (k, r, norm) = best.ok_or(Error::NoConvergence { sweeps: MAX_SWEEPS })?;
        if norm < 1e-6 {
            return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
        }
        used[k] = true;
        // second pass keeps the basis orthonormal to working precision
        let r = project_out(&r, &basis);
        let norm = vec_norm(&r);
        basis.push(r.iter().map(|&z| z.scale(1.0 / norm)).collect());
    }

    let rayleigh: Vec<f64> = basis
        .iter()
        .map(|e| {
            let xe = x.mat_vec(e);
            e.iter().zip(&xe).map(|(a, b)| (a.conj() * *b).a).sum()
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| rayleigh[j].total_cmp(&rayleigh[i]));
    Ok(Matrix::from_fn(n, n, |i, k| basis[order[k]][i]))
}

fn project_out(v: &[Quaternion], basis: &[Vec<Quaternion>]) -> Vec<Quaternion> {
    let mut r = v.to_vec();
    for e in basis {
        let mut coef = Quaternion::default();
        for (a, b) in e.iter().zip(&r) {
            coef += a.conj() * *b;
        }
        for (ri, ei) in r.iter_mut().zip(e) {
            *ri -= *ei * coef;
        }
    }
    r
}

fn vec_norm(v: &[Quaternion]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hermitian<T: Scalar>(n: usize, seed: u64) -> Matrix<T> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::from_fn(n, n, |_, _| T::sample_normal(&mut rng)).hermitian_part()
    }

    fn check_decomposition<T: Field>(x: &Matrix<T>) {
        let dec = T::eigh(x).unwrap();
        let n = x.rows();
        let err = (&dec.reconstruct() - x).frobenius_norm();
        assert!(err <= 1e-10 * x.frobenius_norm().max(1.0), "reconstruction error {err}");
        let gram = &dec.unitary.adjoint() * &dec.unitary;
        assert!((&gram - &Matrix::identity(n)).frobenius_norm() < 1e-10);
        assert!(dec.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn diagonal_input() {
        let dec = f64::eigh(&Matrix::from_real_diag(&[3.0, 1.0])).unwrap();
        assert_eq!(dec.eigenvalues, vec![3.0, 1.0]);
        assert_eq!(dec.unitary, Matrix::identity(2));
        let dec = f64::eigh(&Matrix::from_real_diag(&[1.0, 3.0])).unwrap();
        assert_eq!(dec.eigenvalues, vec![3.0, 1.0]);
    }

    #[test]
    fn two_by_two_examples() {
        let x = Matrix::from_rows(vec![vec![c(0.0, 0.0), c(0.0, 1.0)], vec![c(0.0, -1.0), c(0.0, 0.0)]]).unwrap();
        let dec = Complex64::eigh(&x).unwrap();
        assert!((dec.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((dec.eigenvalues[1] + 1.0).abs() < 1e-14);
        let y = Matrix::from_rows(vec![vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let dec = f64::eigh(&y).unwrap();
        assert!((dec.eigenvalues[0] - 3.0).abs() < 1e-14);
        assert!((dec.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn random_reconstruction_all_fields() {
        for seed in 0..20 {
            let n = 1 + (seed as usize % 6);
            check_decomposition(&random_hermitian::<f64>(n, seed));
            check_decomposition(&random_hermitian::<Complex64>(n, seed));
            check_decomposition(&random_hermitian::<Quaternion>(n, seed));
        }
    }

    #[test]
    fn repeated_eigenvalues() {
        let x = Matrix::<Quaternion>::from_real_diag(&[2.0, 2.0, 2.0, -1.0]);
        check_decomposition(&x);
        let u = Matrix::<Complex64>::identity(5).scale(4.0);
        check_decomposition(&u);
    }

    #[test]
    fn rejects_non_hermitian() {
        let x = Matrix::from_rows(vec![vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(f64::eigh(&x), Err(Error::NotHermitian { .. })));
        let q = Matrix::from_rows(vec![vec![Quaternion::I]]).unwrap();
        assert!(matches!(Quaternion::eigh(&q), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn quaternion_eigenvalues_match_embedding() {
        let x = random_hermitian::<Quaternion>(4, 99);
        let ev = Quaternion::eigenvalues(&x).unwrap();
        let embedded = jacobi_eigh(&psi_matrix(&x)).unwrap().eigenvalues;
        for (k, l) in ev.iter().enumerate() {
            assert!((l - embedded[2 * k]).abs() < 1e-10);
            assert!((l - embedded[2 * k + 1]).abs() < 1e-10);
        }
    }
}
