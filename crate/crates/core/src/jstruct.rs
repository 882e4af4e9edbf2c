//! The signature matrix `J`, the involution `X -> J X* J`, and membership in
//! the J-Hermitian space and the J-positive cone.

use serde::{Deserialize, Serialize};

use crate::matcore::{Field, Matrix};
use crate::scalars::Scalar;
use crate::{Error, Result};

/// Default relative tolerance for membership tests.
pub const MEMBERSHIP_TOL: f64 = 1e-10;

/// The pair `(p, q)` defining `J = diag(Id_p, -Id_q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    p: usize,
    q: usize,
}

impl Signature {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p + q == 0 {
            return Err(Error::InvalidSignature { p, q });
        }
        Ok(Signature { p, q })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n(&self) -> usize {
        self.p + self.q
    }

    /// Diagonal of `J`.
    pub fn sign(&self, i: usize) -> f64 {
        if i < self.p {
            1.0
        } else {
            -1.0
        }
    }

    pub fn j<T: Scalar>(&self) -> Matrix<T> {
        let diag: Vec<f64> = (0..self.n()).map(|i| self.sign(i)).collect();
        Matrix::from_real_diag(&diag)
    }

    pub fn check_dim<T: Scalar>(&self, x: &Matrix<T>) -> Result<()> {
        let n = x.dim()?;
        if n != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: n });
        }
        Ok(())
    }

    pub fn ensure_same(&self, other: &Signature) -> Result<()> {
        if self != other {
            return Err(Error::SignatureMismatch(self.p, self.q, other.p, other.q));
        }
        Ok(())
    }

    /// `J X`, computed by flipping the signs of the last `q` rows.
    pub fn left<T: Scalar>(&self, x: &Matrix<T>) -> Matrix<T> {
        Matrix::from_fn(x.rows(), x.cols(), |i, j| if i < self.p { x[(i, j)] } else { -x[(i, j)] })
    }

    /// `X J`, computed by flipping the signs of the last `q` columns.
    pub fn right<T: Scalar>(&self, x: &Matrix<T>) -> Matrix<T> {
        Matrix::from_fn(x.rows(), x.cols(), |i, j| if j < self.p { x[(i, j)] } else { -x[(i, j)] })
    }

    /// `J X J`.
    pub fn conjugate<T: Scalar>(&self, x: &Matrix<T>) -> Matrix<T> {
        Matrix::from_fn(x.rows(), x.cols(), |i, j| {
            if (i < self.p) == (j < self.p) {
                x[(i, j)]
            } else {
                -x[(i, j)]
            }
        })
    }
}

impl std::fmt::Display for Signature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{}", self.p, self.q)
    }
}

impl std::str::FromStr for Signature {
    type Err = Error;

    /// Parses `"p,q"`.
    fn from_str(s: &str) -> Result<Self> {
        let (p, q) = s
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("signature `{s}` is not of the form p,q")))?;
        let parse = |v: &str| {
            v.trim().parse::<usize>().map_err(|e| Error::Parse(format!("signature `{s}`: {e}")))
        };
        Signature::new(parse(p)?, parse(q)?)
    }
}

/// `X^# = J X* J`.
pub fn sharp<T: Scalar>(x: &Matrix<T>, sig: Signature) -> Result<Matrix<T>> {
    sig.check_dim(x)?;
    Ok(sig.conjugate(&x.adjoint()))
}

/// `||X^# - X||_F`.
pub fn j_hermitian_residual<T: Scalar>(x: &Matrix<T>, sig: Signature) -> Result<f64> {
    Ok((&sharp(x, sig)? - x).frobenius_norm())
}

/// `||X^# - X||_F <= tol * max(1, ||X||_F)`.
pub fn is_j_hermitian<T: Scalar>(x: &Matrix<T>, sig: Signature, tol: f64) -> Result<bool> {
    Ok(j_hermitian_residual(x, sig)? <= tol * x.frobenius_norm().max(1.0))
}

pub(crate) fn ensure_j_hermitian<T: Scalar>(x: &Matrix<T>, sig: Signature) -> Result<()> {
    let residual = j_hermitian_residual(x, sig)?;
    if residual > MEMBERSHIP_TOL * x.frobenius_norm().max(1.0) {
        return Err(Error::NotJHermitian { residual });
    }
    Ok(())
}

/// `g^# g = Id` up to `tol`.
pub fn is_in_u_j<T: Scalar>(g: &Matrix<T>, sig: Signature, tol: f64) -> Result<bool> {
    let n = sig.n();
    let prod = &sharp(g, sig)? * g;
    Ok((&prod - &Matrix::identity(n)).frobenius_norm() <= tol)
}

/// Membership in `U_J` intersected with the unitary group.
pub fn is_in_k_j<T: Scalar>(g: &Matrix<T>, sig: Signature, tol: f64) -> Result<bool> {
    let n = sig.n();
    let unitary = (&(&g.adjoint() * g) - &Matrix::identity(n)).frobenius_norm() <= tol;
    Ok(unitary && is_in_u_j(g, sig, tol)?)
}

/// A J-Hermitian matrix written as `[[A, B], [-B*, D]]` with `A`, `D` Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct JHermitianBlocks<T> {
    pub a_block: Matrix<T>,
    pub b_block: Matrix<T>,
    pub d_block: Matrix<T>,
}

impl<T: Scalar> JHermitianBlocks<T> {
    pub fn reassemble(&self) -> Matrix<T> {
        let c = -&self.b_block.adjoint();
        Matrix::from_blocks(&self.a_block, &self.b_block, &c, &self.d_block)
    }
}

pub fn block_decompose<T: Scalar>(h: &Matrix<T>, sig: Signature) -> Result<JHermitianBlocks<T>> {
    ensure_j_hermitian(h, sig)?;
    let (p, q) = (sig.p(), sig.q());
    Ok(JHermitianBlocks {
        a_block: h.sub_matrix(0, 0, p, p),
        b_block: h.sub_matrix(0, p, p, q),
        d_block: h.sub_matrix(p, p, q, q),
    })
}

/// Outcome of the Schur-complement positivity test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchurVerdict {
    Positive,
    NotPositive,
    /// The upper-left block is numerically singular, so the complement is undefined.
    Indeterminate,
}

/// `A > 0` and `-D - B* A^{-1} B > 0`.
pub fn schur_j_positive<T: Field>(blocks: &JHermitianBlocks<T>, tol: f64) -> Result<SchurVerdict> {
    let a = blocks.a_block.hermitian_part();
    let a_eig = T::eigenvalues(&a)?;
    let a_scale = a_eig.iter().fold(1f64, |m, l| m.max(l.abs()));
    let a_min = a_eig.last().copied().unwrap_or(f64::INFINITY);
    if a_min.abs() <= tol * a_scale {
        return Ok(SchurVerdict::Indeterminate);
    }
    if a_min < 0.0 {
        return Ok(SchurVerdict::NotPositive);
    }
    let b = &blocks.b_block;
    let a_inv = a.inverse()?;
    let schur = &(-&blocks.d_block) - &(&(&b.adjoint() * &a_inv) * b);
    let s_eig = T::eigenvalues(&schur.hermitian_part())?;
    let s_scale = s_eig.iter().fold(1f64, |m, l| m.max(l.abs()));
    let s_min = s_eig.last().copied().unwrap_or(f64::INFINITY);
    Ok(if s_min > tol * s_scale { SchurVerdict::Positive } else { SchurVerdict::NotPositive })
}

/// A certified member of the J-positive cone.
///
/// The stored matrix is exactly J-Hermitian (it is projected on construction),
/// and `lambda_min` is the smallest eigenvalue of `J X`.
#[derive(Debug, Clone, PartialEq)]
pub struct JPositive<T> {
    matrix: Matrix<T>,
    signature: Signature,
    lambda_min: f64,
}

impl<T: Field> JPositive<T> {
    /// Validates `x` against the cone with relative tolerance `tol`.
    pub fn new(x: Matrix<T>, sig: Signature, tol: f64) -> Result<Self> {
        sig.check_dim(&x)?;
        let residual = j_hermitian_residual(&x, sig)?;
        if residual > tol.max(MEMBERSHIP_TOL) * x.frobenius_norm().max(1.0) {
            return Err(Error::NotJHermitian { residual });
        }
        Self::from_image(sig.left(&x), sig, tol)
    }

    /// Certifies `J^{-1} P = J P` for a Hermitian positive definite `P`.
    pub fn from_image(p: Matrix<T>, sig: Signature, tol: f64) -> Result<Self> {
        let p = p.hermitian_part();
        let eigenvalues = T::eigenvalues(&p)?;
        Self::from_image_with_spectrum(p, sig, &eigenvalues, tol)
    }

    /// As [`JPositive::from_image`] when the spectrum of `P` is already known.
    pub(crate) fn from_image_with_spectrum(p: Matrix<T>, sig: Signature, spectrum: &[f64], tol: f64) -> Result<Self> {
        sig.check_dim(&p)?;
        let norm = spectrum.iter().fold(0f64, |m, l| m.max(l.abs()));
        let lambda_min = spectrum.iter().copied().fold(f64::INFINITY, f64::min);
        let threshold = tol * norm.max(1.0);
        if !(lambda_min > threshold) {
            return Err(Error::NotJPositive { lambda_min, threshold });
        }
        let matrix = sig.left(&p.hermitian_part());
        Ok(JPositive { matrix, signature: sig, lambda_min })
    }

    /// `J` itself.
    pub fn unit(sig: Signature) -> Self {
        JPositive { matrix: sig.j(), signature: sig, lambda_min: 1.0 }
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.matrix
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    /// Smallest eigenvalue of `J X`.
    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    pub fn dim(&self) -> usize {
        self.signature.n()
    }

    /// `J X`, a Hermitian positive definite matrix.
    pub fn image(&self) -> Matrix<T> {
        self.signature.left(&self.matrix)
    }

    /// `alpha X` for `alpha > 0`.
    pub fn scale(&self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::PremiseViolated(format!("scale factor {alpha} must be positive")));
        }
        Ok(JPositive { matrix: self.matrix.scale(alpha), signature: self.signature, lambda_min: alpha * self.lambda_min })
    }

    /// The ordinary inverse, which stays in the cone.
    pub fn inverse(&self) -> Result<Self> {
        let inv = self.matrix.inverse()?;
        Self::new(inv, self.signature, MEMBERSHIP_TOL)
    }

    /// `g X g^#` for invertible `g`.
    pub fn congruence(&self, g: &Matrix<T>) -> Result<Self> {
        let sig = self.signature;
        sig.check_dim(g)?;
        // J g X g^# = M P M* with M = J g J and P = J X
        let m = sig.conjugate(g);
        let p = &(&m * &self.image()) * &m.adjoint();
        Self::from_image(p, sig, MEMBERSHIP_TOL)
    }
}

/// Certifies `x` as J-positive.
pub fn is_j_positive<T: Field>(x: &Matrix<T>, sig: Signature, tol: f64) -> Result<JPositive<T>> {
    JPositive::new(x.clone(), sig, tol)
}

/// `J X`, Hermitian for J-Hermitian `X`.
pub fn phi_j<T: Scalar>(x: &Matrix<T>, sig: Signature) -> Result<Matrix<T>> {
    ensure_j_hermitian(x, sig)?;
    Ok(sig.left(x).hermitian_part())
}

/// `J P`, J-Hermitian for Hermitian `P`.
pub fn phi_j_inv<T: Scalar>(p: &Matrix<T>, sig: Signature) -> Result<Matrix<T>> {
    sig.check_dim(p)?;
    let residual = p.hermitian_residual();
    if residual > MEMBERSHIP_TOL * p.frobenius_norm().max(1.0) {
        return Err(Error::NotHermitian { residual });
    }
    Ok(sig.left(&p.hermitian_part()))
}

/// The indefinite form `B(x, y) = x* J y`.
pub fn j_inner<T: Scalar>(x: &[T], y: &[T], sig: Signature) -> Result<T> {
    for v in [x, y] {
        if v.len() != sig.n() {
            return Err(Error::DimensionMismatch { expected: sig.n(), found: v.len() });
        }
    }
    let mut acc = T::zero();
    for (i, (a, b)) in x.iter().zip(y).enumerate() {
        acc += (a.conj() * *b).scale(sig.sign(i));
    }
    Ok(acc)
}
