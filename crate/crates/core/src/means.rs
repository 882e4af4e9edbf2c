//! Weighted J-geometric means, the Riccati characterization and the
//! inequalities built on top of them.

use serde::{Deserialize, Serialize};

use crate::geometry::geodesic;
use crate::jcalc::{bullet, bullet_commutator, pow_j};
use crate::jstruct::{ensure_j_hermitian, JPositive, Signature, MEMBERSHIP_TOL};
use crate::matcore::{mat_pow_pd, Field, Matrix};
use crate::order::{j_leq, psd_verdict, OrderVerdict};
use crate::{Error, Result};

/// Relative tolerance on the bullet commutator for the closed-form mean.
pub const COMMUTING_TOL: f64 = 1e-8;
/// Absolute lower bound on `lambda_min(J B)` demanded by the Furuta check.
pub const FURUTA_STRICTNESS: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct MeanResult<T> {
    pub mean: JPositive<T>,
    /// `||X A^{-1} X - B||_F`, only computed for the midpoint.
    pub riccati_residual: Option<f64>,
    pub weight: f64,
}

fn check_weight(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::WeightOutOfRange(t))
    }
}

/// `A #_t B` for `t` in `[0, 1]`.
///
/// The endpoints, and any weight when `A == B`, return the inputs unchanged.
pub fn weighted_mean<T: Field>(a: &JPositive<T>, b: &JPositive<T>, t: f64) -> Result<MeanResult<T>> {
    a.signature().ensure_same(&b.signature())?;
    check_weight(t)?;
    let mean = if t == 0.0 || a == b {
        a.clone()
    } else if t == 1.0 {
        b.clone()
    } else {
        geodesic(a, b, t)?
    };
    let riccati_residual = if t == 0.5 { Some(riccati_residual(mean.matrix(), a, b)?) } else { None };
    Ok(MeanResult { mean, riccati_residual, weight: t })
}

/// The midpoint mean `A # B`.
pub fn j_geometric_mean<T: Field>(a: &JPositive<T>, b: &JPositive<T>) -> Result<JPositive<T>> {
    Ok(weighted_mean(a, b, 0.5)?.mean)
}

/// `||X A^{-1} X - B||_F`.
pub fn riccati_residual<T: Field>(x: &Matrix<T>, a: &JPositive<T>, b: &JPositive<T>) -> Result<f64> {
    let sig = a.signature();
    sig.ensure_same(&b.signature())?;
    sig.check_dim(x)?;
    let lhs = &(x * &a.matrix().inverse()?) * x;
    Ok((&lhs - b.matrix()).frobenius_norm())
}

/// The unique J-positive solution of `X A^{-1} X = B`.
pub fn riccati_solve<T: Field>(a: &JPositive<T>, b: &JPositive<T>) -> Result<JPositive<T>> {
    j_geometric_mean(a, b)
}

/// `P^{1/2} (P^{-1/2} Q P^{-1/2})^t P^{1/2}` for Hermitian positive definite `P`, `Q`.
pub fn classical_mean<T: Field>(p: &Matrix<T>, q: &Matrix<T>, t: f64) -> Result<Matrix<T>> {
    let half = mat_pow_pd(p, 0.5)?;
    let neg_half = mat_pow_pd(p, -0.5)?;
    let inner = (&(&neg_half * q) * &neg_half).hermitian_part();
    let moved = mat_pow_pd(&inner, t)?;
    Ok((&(&half * &moved) * &half).hermitian_part())
}

/// Positive semidefiniteness of `[[JA, JX], [JX, JB]]`.
///
/// It holds for every `X` dominated in the sense that this block matrix is
/// positive, and `A # B` is the largest such `X`.
pub fn maximality_check<T: Field>(x: &Matrix<T>, a: &JPositive<T>, b: &JPositive<T>, tol: f64) -> Result<OrderVerdict> {
    let sig = a.signature();
    sig.ensure_same(&b.signature())?;
    sig.check_dim(x)?;
    ensure_j_hermitian(x, sig)?;
    let jx = sig.left(x).hermitian_part();
    let block = Matrix::from_blocks(&a.image(), &jx, &jx, &b.image());
    psd_verdict(&block, tol)
}

/// `pow_J((1-t) pow_J(A,-1) + t pow_J(B,-1), -1)`.
pub fn harmonic_mean_j<T: Field>(a: &JPositive<T>, b: &JPositive<T>, t: f64) -> Result<JPositive<T>> {
    let sig = a.signature();
    sig.ensure_same(&b.signature())?;
    check_weight(t)?;
    let ai = pow_j(a, -1.0)?;
    let bi = pow_j(b, -1.0)?;
    let sum = &ai.matrix().scale(1.0 - t) + &bi.matrix().scale(t);
    pow_j(&JPositive::new(sum, sig, MEMBERSHIP_TOL)?, -1.0)
}

/// `(1-t) A + t B`.
pub fn arithmetic_mean_j<T: Field>(a: &JPositive<T>, b: &JPositive<T>, t: f64) -> Result<JPositive<T>> {
    let sig = a.signature();
    sig.ensure_same(&b.signature())?;
    check_weight(t)?;
    JPositive::new(&a.matrix().scale(1.0 - t) + &b.matrix().scale(t), sig, MEMBERSHIP_TOL)
}

/// `A^{1-t}_J . B^t_J`, valid only when `A` and `B` commute for the bullet product.
pub fn commuting_bullet_mean<T: Field>(a: &JPositive<T>, b: &JPositive<T>, t: f64) -> Result<JPositive<T>> {
    let sig = a.signature();
    sig.ensure_same(&b.signature())?;
    check_weight(t)?;
    ensure_bullet_commuting(a, b)?;
    bullet_product_commuting(&pow_j(a, 1.0 - t)?, &pow_j(b, t)?)
}

fn ensure_bullet_commuting<T: Field>(a: &JPositive<T>, b: &JPositive<T>) -> Result<()> {
    let comm = bullet_commutator(a.matrix(), b.matrix(), a.signature())?.frobenius_norm();
    let scale = (a.matrix().frobenius_norm() * b.matrix().frobenius_norm()).max(1.0);
    if comm > COMMUTING_TOL * scale {
        return Err(Error::NotBulletCommuting(comm));
    }
    Ok(())
}

/// `A . B` for bullet-commuting cone points, which is again in the cone.
pub fn bullet_product_commuting<T: Field>(a: &JPositive<T>, b: &JPositive<T>) -> Result<JPositive<T>> {
    let sig = a.signature();
    sig.ensure_same(&b.signature())?;
    ensure_bullet_commuting(a, b)?;
    // J (A J B) = (J A)(J B) is Hermitian up to roundoff for commuting images
    let image = &a.image() * &b.image();
    JPositive::from_image(image.hermitian_part(), sig, 0.0)
}

/// Outcome of checking an implication `premise => conclusion`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImplicationVerdict {
    pub premise: OrderVerdict,
    /// `None` when the premise fails and the implication is vacuous.
    pub conclusion: Option<OrderVerdict>,
}

impl ImplicationVerdict {
    pub fn holds(&self) -> bool {
        self.conclusion.is_none_or(|c| c.holds)
    }

    pub fn vacuous(&self) -> bool {
        self.conclusion.is_none()
    }
}

fn check_ando_hiai_params(t: f64, r: f64) -> Result<()> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::WeightOutOfRange(t));
    }
    if !(r >= 1.0) {
        return Err(Error::ExponentOutOfRange(r));
    }
    Ok(())
}

/// `A #_t B <=_J J  =>  A^r_J #_t B^r_J <=_J J`.
pub fn ando_hiai_check<T: Field>(a: &JPositive<T>, b: &JPositive<T>, t: f64, r: f64, tol: f64) -> Result<ImplicationVerdict> {
    check_ando_hiai_params(t, r)?;
    let sig = a.signature();
    let j = sig.j::<T>();
    let premise = j_leq(weighted_mean(a, b, t)?.mean.matrix(), &j, sig, tol)?;
    if !premise.holds {
        return Ok(ImplicationVerdict { premise, conclusion: None });
    }
    let lifted = weighted_mean(&pow_j(a, r)?, &pow_j(b, r)?, t)?.mean;
    let conclusion = j_leq(lifted.matrix(), &j, sig, tol)?;
    Ok(ImplicationVerdict { premise, conclusion: Some(conclusion) })
}

/// Rescales both inputs by one positive factor so that `lambda_max(J (A #_t B)) = 0.95`.
pub fn ando_hiai_normalize<T: Field>(a: &JPositive<T>, b: &JPositive<T>, t: f64) -> Result<(JPositive<T>, JPositive<T>)> {
    check_weight(t)?;
    let m = weighted_mean(a, b, t)?.mean;
    let top = T::eigenvalues(&m.image())?.first().copied().unwrap_or(1.0);
    let mu = 0.95 / top;
    Ok((a.scale(mu)?, b.scale(mu)?))
}

/// `(A^{r/2}_J . B^p_J . A^{r/2}_J)^{r/(r+p)}_J <=_J A^r_J` under `0 <_J B <=_J A`.
pub fn furuta_check<T: Field>(a: &JPositive<T>, b: &JPositive<T>, p_exp: f64, r: f64, tol: f64) -> Result<OrderVerdict> {
    let sig = a.signature();
    sig.ensure_same(&b.signature())?;
    if !(p_exp >= 0.0) || !(r >= 1.0) {
        return Err(Error::PremiseViolated(format!("need p >= 0 and r >= 1, got p = {p_exp}, r = {r}")));
    }
    if b.lambda_min() < FURUTA_STRICTNESS {
        return Err(Error::PremiseViolated(format!("lambda_min(JB) = {:e} is below {FURUTA_STRICTNESS:e}", b.lambda_min())));
    }
    let order = j_leq(b.matrix(), a.matrix(), sig, tol)?;
    if !order.holds {
        return Err(Error::PremiseViolated(format!("B <=_J A fails with margin {:e}", order.margin)));
    }
    let a_half = pow_j(a, r / 2.0)?;
    let inner = bullet(&bullet(a_half.matrix(), pow_j(b, p_exp)?.matrix(), sig)?, a_half.matrix(), sig)?;
    let inner = JPositive::new(inner, sig, 0.0)?;
    let lhs = pow_j(&inner, r / (r + p_exp))?;
    j_leq(lhs.matrix(), pow_j(a, r)?.matrix(), sig, tol)
}

/// A J-positive pair with `B <=_J A`, built as `A = B + J (G G*)` with `G` scaled by `bump`.
pub fn comparable_pair<T: Field>(sig: Signature, seed: u64, bump: f64) -> Result<(JPositive<T>, JPositive<T>)> {
    use crate::jcalc::{derive_seed, random_pj, rng_from_seed, sample_matrix};
    let b = random_pj::<T>(sig, seed);
    let g = sample_matrix::<T, _>(&mut rng_from_seed(derive_seed(seed, 1)), sig.n(), sig.n()).scale(bump);
    let image = &b.image() + &(&g * &g.adjoint());
    let a = JPositive::from_image(image, sig, MEMBERSHIP_TOL)?;
    Ok((a, b))
}
