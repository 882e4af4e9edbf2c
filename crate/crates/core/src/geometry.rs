//! Riemannian geometry of the J-positive cone: the metric, geodesics, the
//! geodesic equation residual and the induced distance.

use crate::jcalc::MAX_EXPONENT;
use crate::matcore::functions::check_positive_spectrum;
use crate::jstruct::{ensure_j_hermitian, JPositive};
use crate::matcore::{Field, Matrix};
use crate::{Error, Result};

/// Default finite-difference step.
pub const DEFAULT_STEP: f64 = 1e-4;

/// `omega_P(U, V) = trd(P^{-1} U P^{-1} V)` for J-Hermitian `U`, `V`.
pub fn metric_omega<T: Field>(p: &JPositive<T>, u: &Matrix<T>, v: &Matrix<T>) -> Result<f64> {
    let sig = p.signature();
    for m in [u, v] {
        sig.check_dim(m)?;
        ensure_j_hermitian(m, sig)?;
    }
    // P^{-1} U = S^{-1} (J U) with S = J P, so omega is the trace form of the
    // congruences S^{-1/2} (J U) S^{-1/2} and S^{-1/2} (J V) S^{-1/2}
    let dec = T::eigh(&p.image())?;
    check_positive_spectrum(&dec.eigenvalues, 0.0)?;
    let root = dec.apply(|l| 1.0 / l.sqrt());
    let left = &(&root * &sig.left(u)) * &root;
    let right = &(&root * &sig.left(v)) * &root;
    Ok((&left * &right).trd())
}

/// `A^{1/2}_J . (A^{-1/2}_J . B . A^{-1/2}_J)^t_J . A^{1/2}_J`.
///
/// Any real `t` is accepted; `[0, 1]` traces the segment from `A` to `B`.
pub fn geodesic<T: Field>(a: &JPositive<T>, b: &JPositive<T>, t: f64) -> Result<JPositive<T>> {
    let sig = a.signature();
    sig.ensure_same(&b.signature())?;
    if !(t.abs() <= MAX_EXPONENT) {
        return Err(Error::ExponentOutOfRange(t));
    }
    // Since J^2 = Id, A^s_J . X . A^s_J = J P^s (J X) P^s with P = J A, so the
    // whole formula is evaluated on images and symmetrized at each step.
    let dec = T::eigh(&a.image())?;
    check_positive_spectrum(&dec.eigenvalues, 0.0)?;
    let half = dec.apply(f64::sqrt);
    let neg_half = dec.apply(|l| 1.0 / l.sqrt());
    let inner = (&(&neg_half * &b.image()) * &neg_half).hermitian_part();
    let (moved, spectrum) = T::hermitian_apply(&inner, &|l| l.powf(t))?;
    check_positive_spectrum(&spectrum, 0.0)?;
    JPositive::from_image((&(&half * &moved) * &half).hermitian_part(), sig, 0.0)
}

/// The geodesic segment between two cone points.
#[derive(Debug, Clone)]
pub struct GeodesicPath<T> {
    pub endpoint_a: JPositive<T>,
    pub endpoint_b: JPositive<T>,
}

impl<T: Field> GeodesicPath<T> {
    pub fn new(a: JPositive<T>, b: JPositive<T>) -> Result<Self> {
        a.signature().ensure_same(&b.signature())?;
        Ok(GeodesicPath { endpoint_a: a, endpoint_b: b })
    }

    pub fn sample(&self, t: f64) -> Result<JPositive<T>> {
        geodesic(&self.endpoint_a, &self.endpoint_b, t)
    }

    /// `k >= 2` equally spaced samples. The first and last are the endpoints themselves.
    pub fn samples(&self, k: usize) -> Result<Vec<JPositive<T>>> {
        if k < 2 {
            return Err(Error::PremiseViolated(format!("need at least 2 samples, got {k}")));
        }
        (0..k)
            .map(|i| match i {
                0 => Ok(self.endpoint_a.clone()),
                i if i == k - 1 => Ok(self.endpoint_b.clone()),
                i => self.sample(i as f64 / (k - 1) as f64),
            })
            .collect()
    }
}

/// `||g'' - g' g^{-1} g'||_F` at `t` for an arbitrary curve, by central differences.
pub fn ode_residual_of<T, F>(curve: F, t: f64, h: f64) -> Result<f64>
where
    T: Field,
    F: Fn(f64) -> Result<Matrix<T>>,
{
    if !(h >= 1e-7) {
        return Err(Error::StepTooSmall(h));
    }
    if !(t > h && t < 1.0 - h) {
        return Err(Error::PointOutOfRange { t, h });
    }
    let (gm, g0, gp) = (curve(t - h)?, curve(t)?, curve(t + h)?);
    let d1 = (&gp - &gm).scale(0.5 / h);
    let d2 = (&(&gp - &g0.scale(2.0)) + &gm).scale(1.0 / (h * h));
    let rhs = &(&d1 * &g0.inverse()?) * &d1;
    Ok((&d2 - &rhs).frobenius_norm())
}

/// Residual of the geodesic equation along [`geodesic`].
pub fn geodesic_ode_residual<T: Field>(a: &JPositive<T>, b: &JPositive<T>, t: f64, h: f64) -> Result<f64> {
    a.signature().ensure_same(&b.signature())?;
    ode_residual_of(|s| geodesic(a, b, s).map(JPositive::into_matrix), t, h)
}

/// `||log((JA)^{-1/2} (JB) (JA)^{-1/2})||`, with the norm `sqrt(trd(X* X))`.
pub fn geodesic_distance<T: Field>(a: &JPositive<T>, b: &JPositive<T>) -> Result<f64> {
    let sig = a.signature();
    sig.ensure_same(&b.signature())?;
    let (p_neg_half, _) = crate::matcore::functions::certified_pd_function(&a.image(), |l| 1.0 / l.sqrt())?;
    let inner = &(&p_neg_half * &b.image()) * &p_neg_half;
    let ev = T::eigenvalues(&inner.hermitian_part())?;
    if let Some(&l) = ev.last() {
        if !(l > 0.0) {
            return Err(Error::NotPositive { lambda_min: l, threshold: 0.0 });
        }
    }
    Ok(ev.iter().map(|l| l.ln().powi(2)).sum::<f64>().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jcalc::{exp_j, random_j_hermitian, random_pj, rng_from_seed, sample_gl};
    use crate::jstruct::{phi_j, sharp, Signature};
    use crate::matcore::mat_pow_pd;
    use crate::scalars::{Quaternion, Scalar};
    use num_complex::Complex64;

    fn sig(p: usize, q: usize) -> Signature {
        Signature::new(p, q).unwrap()
    }

    fn diag(s: Signature, d: &[f64]) -> JPositive<f64> {
        JPositive::new(Matrix::from_real_diag(d), s, 1e-10).unwrap()
    }

    fn dist<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> f64 {
        (a - b).frobenius_norm() / a.frobenius_norm().max(b.frobenius_norm()).max(1.0)
    }

    /// Bounded-log pair: `exp_J` of J-Hermitian matrices with Frobenius norm 2.
    fn tame_pair<T: Field>(s: Signature, seed: u64) -> (JPositive<T>, JPositive<T>) {
        let draw = |k: u64| {
            let h = random_j_hermitian::<T>(s, seed * 2 + k);
            exp_j(&h.scale(2.0 / h.frobenius_norm()), s).unwrap()
        };
        (draw(0), draw(1))
    }

    #[test]
    fn metric_examples() {
        let s = sig(1, 1);
        let unit = JPositive::<f64>::unit(s);
        assert!((metric_omega(&unit, &s.j(), &s.j()).unwrap() - 2.0).abs() < 1e-15);
        for seed in 0..10 {
            let s = sig(2, 1);
            let p = random_pj::<Quaternion>(s, seed);
            let u = random_j_hermitian::<Quaternion>(s, seed + 100);
            let v = random_j_hermitian::<Quaternion>(s, seed + 200);
            let g = sample_gl::<Quaternion, _>(&mut rng_from_seed(seed + 300), 3);
            let gs = sharp(&g, s).unwrap();
            let moved = p.congruence(&g).unwrap();
            let lhs = metric_omega(&moved, &(&(&g * &u) * &gs), &(&(&g * &v) * &gs)).unwrap();
            let rhs = metric_omega(&p, &u, &v).unwrap();
            assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0));
            assert!((rhs - metric_omega(&p, &v, &u).unwrap()).abs() <= 1e-10 * rhs.abs().max(1.0));
            assert!(metric_omega(&p, &u, &u).unwrap() > 0.0);
        }
        let bad = Matrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(metric_omega(&unit, &bad, &s.j()), Err(Error::NotJHermitian { .. })));
    }

    #[test]
    fn geodesic_examples() {
        let s = sig(1, 1);
        let a = random_pj::<Complex64>(s, 1);
        for t in [0.0, 0.3, 1.0, 2.5] {
            assert!(dist(geodesic(&a, &a, t).unwrap().matrix(), a.matrix()) < 1e-10);
        }
        let mid = geodesic(&diag(s, &[2.0, -3.0]), &diag(s, &[8.0, -27.0]), 0.5).unwrap();
        assert!(dist(mid.matrix(), &Matrix::from_real_diag(&[4.0, -9.0])) < 1e-14);
        for seed in 0..10 {
            let (a, b) = (random_pj::<Quaternion>(sig(2, 2), seed), random_pj::<Quaternion>(sig(2, 2), seed + 50));
            assert!(dist(geodesic(&a, &b, 1.0).unwrap().matrix(), b.matrix()) < 1e-9);
            assert!(dist(geodesic(&a, &b, 0.0).unwrap().matrix(), a.matrix()) < 1e-9);
        }
        let other = random_pj::<Complex64>(sig(2, 0), 1);
        assert!(matches!(geodesic(&a, &other, 0.5), Err(Error::SignatureMismatch(..))));
    }

    #[test]
    fn geodesic_is_pullback_of_classical() {
        for seed in 0..10 {
            let s = sig(1, 2);
            let (a, b) = (random_pj::<Complex64>(s, seed), random_pj::<Complex64>(s, seed + 20));
            for t in [0.1, 0.5, 0.9] {
                let p = a.image();
                let ph = mat_pow_pd(&p, 0.5).unwrap();
                let pnh = mat_pow_pd(&p, -0.5).unwrap();
                let inner = &(&pnh * &b.image()) * &pnh;
                let delta = &(&ph * &mat_pow_pd(&inner, t).unwrap()) * &ph;
                let got = phi_j(geodesic(&a, &b, t).unwrap().matrix(), s).unwrap();
                assert!(dist(&got, &delta) < 1e-9);
            }
        }
    }

    #[test]
    fn ode_residuals() {
        let s = sig(1, 1);
        let a = random_pj::<f64>(s, 3);
        assert!(geodesic_ode_residual(&a, &a, 0.5, 1e-4).unwrap() < 1e-6);
        let mut impostor_large = 0;
        for seed in 0..20 {
            let (a, b) = tame_pair::<Complex64>(sig(1, 1), seed);
            let scale = a.matrix().frobenius_norm().max(b.matrix().frobenius_norm()).max(1.0);
            assert!(geodesic_ode_residual(&a, &b, 0.5, 1e-4).unwrap() <= 1e-5 * scale);
            let (pa, pb) = (a.image(), b.image());
            let line = |t: f64| Ok(s.left(&(&pa.scale(1.0 - t) + &pb.scale(t))));
            if ode_residual_of(line, 0.5, 1e-4).unwrap() > 1e-2 {
                impostor_large += 1;
            }
        }
        assert!(impostor_large >= 18);
        assert!(matches!(geodesic_ode_residual(&a, &a, 0.5, 1e-8), Err(Error::StepTooSmall(_))));
        assert!(matches!(geodesic_ode_residual(&a, &a, 1.0, 1e-4), Err(Error::PointOutOfRange { .. })));
    }

    #[test]
    fn distance_examples() {
        let s = sig(1, 1);
        let a = random_pj::<Quaternion>(sig(1, 2), 9);
        assert!(geodesic_distance(&a, &a).unwrap() < 1e-12);
        let d = geodesic_distance(&diag(s, &[2.0, -3.0]), &diag(s, &[8.0, -27.0])).unwrap();
        let expected = (4f64.ln().powi(2) + 9f64.ln().powi(2)).sqrt();
        assert!((d - expected).abs() < 1e-14);
        assert!((d - 2.59800).abs() < 1e-5);
        for seed in 0..10 {
            let s = sig(2, 1);
            let (a, b) = (random_pj::<Complex64>(s, seed), random_pj::<Complex64>(s, seed + 7));
            let dab = geodesic_distance(&a, &b).unwrap();
            assert!((dab - geodesic_distance(&b, &a).unwrap()).abs() < 1e-9 * dab.max(1.0));
            let g = sample_gl::<Complex64, _>(&mut rng_from_seed(seed), 3);
            let moved = geodesic_distance(&a.congruence(&g).unwrap(), &b.congruence(&g).unwrap()).unwrap();
            assert!((moved - dab).abs() < 1e-8 * dab.max(1.0));
            let mid = geodesic(&a, &b, 0.3).unwrap();
            let split = geodesic_distance(&a, &mid).unwrap() + geodesic_distance(&mid, &b).unwrap();
            assert!((split - dab).abs() < 1e-8 * dab.max(1.0));
        }
    }

    #[test]
    fn path_samples() {
        let s = sig(1, 1);
        let path = GeodesicPath::new(diag(s, &[2.0, -3.0]), diag(s, &[8.0, -27.0])).unwrap();
        let pts = path.samples(3).unwrap();
        assert_eq!(pts.len(), 3);
        assert!(dist(pts[1].matrix(), &Matrix::from_real_diag(&[4.0, -9.0])) < 1e-14);
        assert!(path.samples(1).is_err());
    }
}
