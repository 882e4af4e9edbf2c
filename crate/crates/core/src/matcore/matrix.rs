use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::scalars::{Scalar, ScalarField};
use crate::{Error, Result};

/// Dense row-major matrix over R, C or H.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch { expected: c, found: row.len() });
            }
            data.extend(row);
        }
        Ok(Matrix { rows: r, cols: c, data })
    }

    /// Diagonal matrix with real entries.
    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { T::from_real(diag[i]) } else { T::zero() })
    }

    pub fn field(&self) -> ScalarField {
        T::FIELD
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|x| x.scale(s))
    }

    /// `s * X` with the scalar acting from the left.
    pub fn scale_left(&self, s: T) -> Self {
        self.map(|x| s * x)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> T {
        let n = self.rows.min(self.cols);
        let mut acc = T::zero();
        for i in 0..n {
            acc += self[(i, i)];
        }
        acc
    }

    /// Reduced trace: real part of the trace.
    pub fn trd(&self) -> f64 {
        self.trace().re()
    }

    pub fn hermitian_residual(&self) -> f64 {
        (self - &self.adjoint()).frobenius_norm()
    }

    /// `(X + X*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale(0.5)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn sub_matrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Assembles `[[a, b], [c, d]]`.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        let (p, q) = (a.rows, d.rows);
        Self::from_fn(p + q, a.cols + b.cols, |i, j| match (i < p, j < a.cols) {
            (true, true) => a[(i, j)],
            (true, false) => b[(i, j - a.cols)],
            (false, true) => c[(i - p, j)],
            (false, false) => d[(i - p, j - a.cols)],
        })
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: rhs.rows });
        }
        Ok(self.mul_unchecked(rhs))
    }

    fn mul_unchecked(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                let rrow = rhs.row(k);
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mat_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for (a, &b) in self.row(i).iter().zip(v) {
                    acc += *a * b;
                }
                acc
            })
            .collect()
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    ///
    /// Row operations multiply from the left, which keeps the elimination
    /// valid over the non-commutative quaternions.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.dim()?;
        let threshold = 1e-13 * self.frobenius_norm();
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let (piv, piv_abs) = (col..n)
                .map(|r| (r, a[(r, col)].abs()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if piv_abs <= threshold || piv_abs == 0.0 {
                return Err(Error::Singular { pivot: piv_abs, threshold });
            }
            a.swap_rows(col, piv);
            inv.swap_rows(col, piv);
            let p_inv = a[(col, col)].recip();
            a.left_scale_row(col, p_inv);
            inv.left_scale_row(col, p_inv);
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f == T::zero() {
                    continue;
                }
                a.axpy_row(r, col, f);
                inv.axpy_row(r, col, f);
            }
        }
        Ok(inv)
    }

    /// Product of pivot magnitudes of an LU factorisation, i.e. `|det|`
    /// (the Dieudonne determinant over H).
    pub fn det_abs(&self) -> Result<f64> {
        let n = self.dim()?;
        let mut a = self.clone();
        let mut det = 1.0;
        for col in 0..n {
            let (piv, piv_abs) = (col..n)
                .map(|r| (r, a[(r, col)].abs()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if piv_abs == 0.0 {
                return Ok(0.0);
            }
            a.swap_rows(col, piv);
            det *= piv_abs;
            let p_inv = a[(col, col)].recip();
            for r in col + 1..n {
                let f = a[(r, col)] * p_inv;
                if f == T::zero() {
                    continue;
                }
                for c in col..n {
                    let v = f * a[(col, c)];
                    a[(r, c)] -= v;
                }
            }
        }
        Ok(det)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn left_scale_row(&mut self, i: usize, s: T) {
        for x in &mut self.data[i * self.cols..(i + 1) * self.cols] {
            *x = s * *x;
        }
    }

    /// `row[target] -= f * row[source]`.
    fn axpy_row(&mut self, target: usize, source: usize, f: T) {
        for c in 0..self.cols {
            let v = f * self[(source, c)];
            self[(target, c)] -= v;
        }
    }

    /// General matrix exponential by scaling and squaring of a Taylor series.
    pub fn exp(&self) -> Result<Self> {
        let n = self.dim()?;
        let norm = self.norm_inf();
        let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
        let scaled = self.scale(0.5f64.powi(squarings));
        let mut sum = Self::identity(n);
        let mut term = Self::identity(n);
        for k in 1..=30 {
            term = (&term * &scaled).scale(1.0 / k as f64);
            sum = &sum + &term;
            if term.frobenius_norm() <= f64::EPSILON * 1e-3 * sum.frobenius_norm() {
                break;
            }
        }
        for _ in 0..squarings {
            sum = &sum * &sum;
        }
        Ok(sum)
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Mul for &Matrix<T> {
    type Output = Matrix<T>;

    /// Panics on incompatible shapes; use [`Matrix::checked_mul`] for a fallible product.
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        self.mul_unchecked(rhs)
    }
}

impl<T: Scalar> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Scalar> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix difference shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<T: Scalar> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.map(|x| -x)
    }
}

/// `max(1, ||X||_F)`, the scale used by relative tolerances.
pub fn scale_of<T: Scalar>(x: &Matrix<T>) -> f64 {
    x.frobenius_norm().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Quaternion;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random<T: Scalar>(n: usize, seed: u64) -> Matrix<T> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::from_fn(n, n, |_, _| T::sample_normal(&mut rng))
    }

    #[test]
    fn inverse_examples() {
        let id = Matrix::<f64>::identity(3);
        assert_eq!(id.inverse().unwrap(), id);
        let d = Matrix::<f64>::from_real_diag(&[2.0, -3.0]);
        let inv = d.inverse().unwrap();
        assert!((&inv - &Matrix::from_real_diag(&[0.5, -1.0 / 3.0])).frobenius_norm() < 1e-15);
        let singular = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(singular.inverse(), Err(Error::Singular { .. })));
    }

    #[test]
    fn adjoint_example() {
        let x = Matrix::from_rows(vec![vec![c(0.0, 0.0), c(0.0, 1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]]).unwrap();
        let expected =
            Matrix::from_rows(vec![vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, -1.0), c(0.0, 0.0)]]).unwrap();
        assert_eq!(x.adjoint(), expected);
    }

    #[test]
    fn adjoint_reverses_products() {
        let a = random::<Quaternion>(3, 1);
        let b = random::<Quaternion>(3, 2);
        let lhs = (&a * &b).adjoint();
        let rhs = &b.adjoint() * &a.adjoint();
        assert!((&lhs - &rhs).frobenius_norm() < 1e-12);
        assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn inverse_over_each_field() {
        fn check<T: Scalar>(seed: u64) {
            let x = random::<T>(4, seed);
            let inv = x.inverse().unwrap();
            let id = Matrix::<T>::identity(4);
            assert!((&(&x * &inv) - &id).frobenius_norm() < 1e-10);
            assert!((&(&inv * &x) - &id).frobenius_norm() < 1e-10);
        }
        check::<f64>(3);
        check::<Complex64>(4);
        check::<Quaternion>(5);
    }

    #[test]
    fn trd_examples() {
        assert_eq!(Matrix::<Complex64>::identity(4).trd(), 4.0);
        let d = Matrix::from_rows(vec![
            vec![Quaternion::I, Quaternion::default()],
            vec![Quaternion::default(), Quaternion::J],
        ])
        .unwrap();
        assert_eq!(d.trd(), 0.0);
        let a = random::<Quaternion>(3, 11);
        let b = random::<Quaternion>(3, 12);
        assert!(((&a * &b).trd() - (&b * &a).trd()).abs() < 1e-12);
        // the full quaternionic trace is not cyclic, only its real part
        assert!(!crate::scalars::approx_eq((&a * &b).trace(), (&b * &a).trace(), 1e-6));
    }

    #[test]
    fn general_exponential() {
        let two_pi = 2.0 * std::f64::consts::PI;
        let x = Matrix::from_rows(vec![vec![c(0.0, 0.0), c(0.0, two_pi)], vec![c(0.0, two_pi), c(0.0, 0.0)]]).unwrap();
        let e = x.exp().unwrap();
        assert!((&e - &Matrix::identity(2)).frobenius_norm() < 1e-12);
        let d = Matrix::<f64>::from_real_diag(&[1.0, -2.0]).exp().unwrap();
        assert!((d[(0, 0)] - 1f64.exp()).abs() < 1e-14);
        assert!((d[(1, 1)] - (-2f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn det_abs_of_diagonal() {
        let d = Matrix::<f64>::from_real_diag(&[2.0, -3.0, 0.5]);
        assert!((d.det_abs().unwrap() - 3.0).abs() < 1e-15);
        let q = Matrix::from_rows(vec![vec![Quaternion::new(0.0, 3.0, 4.0, 0.0)]]).unwrap();
        assert!((q.det_abs().unwrap() - 5.0).abs() < 1e-15);
    }

    #[test]
    fn blocks_round_trip() {
        let x = random::<Complex64>(5, 9);
        let a = x.sub_matrix(0, 0, 2, 2);
        let b = x.sub_matrix(0, 2, 2, 3);
        let c = x.sub_matrix(2, 0, 3, 2);
        let d = x.sub_matrix(2, 2, 3, 3);
        assert_eq!(Matrix::from_blocks(&a, &b, &c, &d), x);
    }
}
