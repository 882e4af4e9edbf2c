//! The Loewner order and its pullback to J-Hermitian matrices.

use serde::{Deserialize, Serialize};

use crate::jstruct::{ensure_j_hermitian, Signature};
use crate::matcore::eigen::check_hermitian;
use crate::matcore::{Field, Matrix};
use crate::{Error, Result};

/// Default one-sided slack for semidefinite comparisons.
pub const ORDER_TOL: f64 = 1e-9;

/// Result of an order comparison.
///
/// `margin` is the smallest eigenvalue of the relevant difference; it is
/// nonnegative exactly when the order holds in exact arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderVerdict {
    pub holds: bool,
    pub margin: f64,
    /// `max(1, norms of the compared matrices)`; not part of the serialized form.
    #[serde(skip, default = "unit_scale")]
    pub scale: f64,
}

fn unit_scale() -> f64 {
    1.0
}

impl OrderVerdict {
    /// `holds = margin >= -tol * scale`.
    pub fn from_margin(margin: f64, scale: f64, tol: f64) -> Self {
        let scale = scale.max(1.0);
        OrderVerdict { holds: margin >= -tol * scale, margin, scale }
    }

    /// `margin / scale + tol`, nonnegative exactly when the verdict holds at `tol`.
    pub fn slack(&self, tol: f64) -> f64 {
        self.margin / self.scale + tol
    }
}

/// Positive semidefiniteness of a Hermitian matrix, with slack relative to `max(1, ||M||_F)`.
pub fn psd_verdict<T: Field>(m: &Matrix<T>, tol: f64) -> Result<OrderVerdict> {
    check_hermitian(m)?;
    let margin = T::eigenvalues(&m.hermitian_part())?.last().copied().unwrap_or(0.0);
    Ok(OrderVerdict::from_margin(margin, m.frobenius_norm(), tol))
}

/// `X <= Y` iff `Y - X` is positive semidefinite.
pub fn loewner_leq<T: Field>(x: &Matrix<T>, y: &Matrix<T>, tol: f64) -> Result<OrderVerdict> {
    let (nx, ny) = (x.dim()?, y.dim()?);
    if nx != ny {
        return Err(Error::DimensionMismatch { expected: nx, found: ny });
    }
    check_hermitian(x)?;
    check_hermitian(y)?;
    let diff = (y - x).hermitian_part();
    let margin = T::eigenvalues(&diff)?.last().copied().unwrap_or(0.0);
    let scale = x.frobenius_norm().max(y.frobenius_norm());
    Ok(OrderVerdict::from_margin(margin, scale, tol))
}

/// `X <=_J Y` iff `J X <= J Y`.
pub fn j_leq<T: Field>(x: &Matrix<T>, y: &Matrix<T>, sig: Signature, tol: f64) -> Result<OrderVerdict> {
    sig.check_dim(x)?;
    sig.check_dim(y)?;
    ensure_j_hermitian(x, sig)?;
    ensure_j_hermitian(y, sig)?;
    loewner_leq(&sig.left(x).hermitian_part(), &sig.left(y).hermitian_part(), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jcalc::{pow_j, random_pj, rng_from_seed, sample_gl, sample_matrix};
    use crate::jstruct::{phi_j_inv, sharp, JPositive};
    use crate::scalars::{Quaternion, Scalar};
    use num_complex::Complex64;

    fn sig(p: usize, q: usize) -> Signature {
        Signature::new(p, q).unwrap()
    }

    #[test]
    fn loewner_examples() {
        let id = Matrix::<f64>::identity(2);
        let v = loewner_leq(&id, &id.scale(2.0), ORDER_TOL).unwrap();
        assert!(v.holds);
        assert!((v.margin - 1.0).abs() < 1e-15);
        let v = loewner_leq(&Matrix::<f64>::from_real_diag(&[1.0, 3.0]), &Matrix::from_real_diag(&[2.0, 2.0]), ORDER_TOL).unwrap();
        assert!(!v.holds);
        let x = Matrix::from_rows(vec![vec![2.0, 1.0], vec![1.0, 5.0]]).unwrap();
        let v = loewner_leq(&x, &x, ORDER_TOL).unwrap();
        assert!(v.holds && v.margin == 0.0);
        assert!(matches!(loewner_leq(&x, &Matrix::identity(3), ORDER_TOL), Err(Error::DimensionMismatch { .. })));
        let ns = Matrix::from_rows(vec![vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(loewner_leq(&ns, &x, ORDER_TOL), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn j_order_examples() {
        let s = sig(1, 1);
        let j = s.j::<f64>();
        assert!(j_leq(&j, &j.scale(2.0), s, ORDER_TOL).unwrap().holds);
        let x = Matrix::<f64>::from_real_diag(&[2.0, -3.0]);
        let y = Matrix::<f64>::from_real_diag(&[3.0, -4.0]);
        let v = j_leq(&x, &y, s, ORDER_TOL).unwrap();
        assert!(v.holds && (v.margin - 1.0).abs() < 1e-15);
        assert!(!j_leq(&y, &x, s, ORDER_TOL).unwrap().holds);
        assert!(j_leq(&x, &x, s, ORDER_TOL).unwrap().holds);
        let bad = Matrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(j_leq(&bad, &x, s, ORDER_TOL), Err(Error::NotJHermitian { .. })));
    }

    fn comparable_pair<T: Field>(s: Signature, seed: u64) -> (JPositive<T>, JPositive<T>) {
        let x = random_pj::<T>(s, seed);
        let mut rng = rng_from_seed(seed ^ 0x55);
        let g = sample_matrix::<T, _>(&mut rng, s.n(), s.n());
        let bump = phi_j_inv(&(&g * &g.adjoint()).hermitian_part(), s).unwrap();
        let y = JPositive::new(x.matrix() + &bump, s, 1e-10).unwrap();
        (x, y)
    }

    #[test]
    fn power_monotonicity_on_unit_interval() {
        for seed in 0..30 {
            let (x, y) = comparable_pair::<Quaternion>(sig(2, 1), seed);
            for t in [0.25, 0.5, 0.75, 1.0] {
                let v = j_leq(pow_j(&x, t).unwrap().matrix(), pow_j(&y, t).unwrap().matrix(), sig(2, 1), 1e-8).unwrap();
                assert!(v.holds, "t = {t}, margin {}", v.margin);
            }
        }
    }

    #[test]
    fn squaring_is_not_monotone() {
        let s = sig(1, 1);
        let failures = (0..200)
            .filter(|&seed| {
                let (x, y) = comparable_pair::<f64>(s, seed);
                !j_leq(pow_j(&x, 2.0).unwrap().matrix(), pow_j(&y, 2.0).unwrap().matrix(), s, 1e-8).unwrap().holds
            })
            .count();
        assert!(failures >= 1);
    }

    #[test]
    fn congruence_and_inverse() {
        let s = sig(1, 2);
        for seed in 0..20 {
            let (x, y) = comparable_pair::<Complex64>(s, seed);
            let c = sample_gl::<Complex64, _>(&mut rng_from_seed(seed + 1000), 3);
            let cs = sharp(&c, s).unwrap();
            let v = j_leq(&(&(&cs * x.matrix()) * &c), &(&(&cs * y.matrix()) * &c), s, 1e-8).unwrap();
            assert!(v.holds);
            let v = j_leq(y.inverse().unwrap().matrix(), x.inverse().unwrap().matrix(), s, 1e-8).unwrap();
            assert!(v.holds);
        }
    }

    #[test]
    fn margin_scaling() {
        // slack is tol * scale = 1e-7
        assert!(!OrderVerdict::from_margin(-1e-6, 100.0, 1e-9).holds);
        let v = OrderVerdict::from_margin(-1e-8, 100.0, 1e-9);
        assert!(v.holds);
        assert!((v.slack(1e-9) - 9e-10).abs() < 1e-20);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"holds":true,"margin":-1e-8}"#);
        let psd = psd_verdict(&Matrix::<Quaternion>::from_real_diag(&[1.0, 0.0]), 1e-9).unwrap();
        assert!(psd.holds);
        let _ = Quaternion::zero();
    }
}
