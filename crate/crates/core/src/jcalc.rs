//! The bullet product `A . B = A J B`, the J-exponential and J-logarithm,
//! fractional J-powers, the polar decomposition for the bullet product, and
//! random sampling of cone elements.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::jstruct::{ensure_j_hermitian, sharp, JPositive, Signature, MEMBERSHIP_TOL};
use crate::matcore::functions::certified_pd_function;
use crate::matcore::{Field, Matrix};
use crate::scalars::Scalar;
use crate::{Error, Result};

/// Largest `|t|` accepted by [`pow_j`].
pub const MAX_EXPONENT: f64 = 32.0;

/// `A J B`. The unit for this product is `J`.
pub fn bullet<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>, sig: Signature) -> Result<Matrix<T>> {
    sig.check_dim(a)?;
    sig.check_dim(b)?;
    Ok(&sig.right(a) * b)
}

/// `J A^{-1} J`, the inverse for the bullet product.
pub fn bullet_inverse<T: Scalar>(a: &Matrix<T>, sig: Signature) -> Result<Matrix<T>> {
    sig.check_dim(a)?;
    Ok(sig.conjugate(&a.inverse()?))
}

/// `X . Y - Y . X`.
pub fn bullet_commutator<T: Scalar>(x: &Matrix<T>, y: &Matrix<T>, sig: Signature) -> Result<Matrix<T>> {
    Ok(&bullet(x, y, sig)? - &bullet(y, x, sig)?)
}

/// `exp_J(X) = J exp(J X)` for J-Hermitian `X`.
pub fn exp_j<T: Field>(x: &Matrix<T>, sig: Signature) -> Result<JPositive<T>> {
    sig.check_dim(x)?;
    ensure_j_hermitian(x, sig)?;
    let (e, spectrum) = T::hermitian_apply(&sig.left(x).hermitian_part(), &f64::exp)?;
    let exp_spectrum: Vec<f64> = spectrum.iter().map(|l| l.exp()).collect();
    JPositive::from_image_with_spectrum(e, sig, &exp_spectrum, 0.0)
}

/// `log_J(X) = J log(J X)`, J-Hermitian.
pub fn log_j<T: Field>(x: &JPositive<T>) -> Result<Matrix<T>> {
    let sig = x.signature();
    let (l, _) = certified_pd_function(&x.image(), f64::ln)?;
    Ok(sig.left(&l.hermitian_part()))
}

/// `X^t_J = J (J X)^t`.
pub fn pow_j<T: Field>(x: &JPositive<T>, t: f64) -> Result<JPositive<T>> {
    if !(t.abs() <= MAX_EXPONENT) {
        return Err(Error::ExponentOutOfRange(t));
    }
    let sig = x.signature();
    if t == 0.0 {
        return Ok(JPositive::unit(sig));
    }
    if t == 1.0 {
        return Ok(x.clone());
    }
    let (p, spectrum) = certified_pd_function(&x.image(), |l| l.powf(t))?;
    let pow_spectrum: Vec<f64> = spectrum.iter().map(|l| l.powf(t)).collect();
    JPositive::from_image_with_spectrum(p, sig, &pow_spectrum, 0.0)
}

/// Writes `g = k . p` with `k` unitary and `p` J-positive.
///
/// With `|g| = (g* g)^{1/2}`, `k = g |g|^{-1}` and `p = J |g|`.
pub fn polar_decompose_bullet<T: Field>(g: &Matrix<T>, sig: Signature) -> Result<(Matrix<T>, JPositive<T>)> {
    sig.check_dim(g)?;
    let gram = &g.adjoint() * g;
    let (abs, spectrum) = T::hermitian_apply(&gram.hermitian_part(), &f64::sqrt)?;
    let lambda_min = spectrum.last().copied().unwrap_or(1.0);
    let threshold = 1e-13 * spectrum.first().copied().unwrap_or(1.0).max(1.0);
    if !(lambda_min > threshold * threshold) {
        return Err(Error::Singular { pivot: lambda_min.max(0.0).sqrt(), threshold });
    }
    let k = g * &abs.inverse()?;
    let abs_spectrum: Vec<f64> = spectrum.iter().map(|l| l.sqrt()).collect();
    let p = JPositive::from_image_with_spectrum(abs, sig, &abs_spectrum, 0.0)?;
    Ok((k, p))
}

/// Splits one seed into independent per-draw seeds.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 over the combined state
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sample_matrix<T: Scalar, R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix<T> {
    Matrix::from_fn(rows, cols, |_, _| T::sample_normal(rng))
}

/// A Gaussian matrix with `|det| >= 1e-6` and `cond(g g*) <= SAMPLER_MAX_CONDITION`.
pub fn sample_gl<T: Field, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix<T> {
    loop {
        let g = sample_matrix(rng, n, n);
        if !g.det_abs().is_ok_and(|d| d >= 1e-6) {
            continue;
        }
        if let Ok(spectrum) = T::eigenvalues(&(&g * &g.adjoint()).hermitian_part()) {
            let (top, bottom) = (spectrum[0], spectrum[spectrum.len() - 1]);
            if bottom > 0.0 && top / bottom <= SAMPLER_MAX_CONDITION {
                return g;
            }
        }
    }
}

/// Largest condition number of `J X` accepted by [`sample_pj`].
pub const SAMPLER_MAX_CONDITION: f64 = 1e4;

/// `g J g^#` for a Gaussian `g`, redrawn until `J X` has condition number at most
/// [`SAMPLER_MAX_CONDITION`].
pub fn sample_pj<T: Field, R: Rng + ?Sized>(rng: &mut R, sig: Signature) -> JPositive<T> {
    loop {
        let g = sample_gl::<T, _>(rng, sig.n());
        // J (g J g^#) = (J g)(J g)*
        let jg = sig.left(&g);
        let image = (&jg * &jg.adjoint()).hermitian_part();
        let Ok(spectrum) = T::eigenvalues(&image) else { continue };
        let (top, bottom) = (spectrum[0], spectrum[spectrum.len() - 1]);
        if !(bottom > 0.0 && top / bottom <= SAMPLER_MAX_CONDITION) {
            continue;
        }
        if let Ok(x) = JPositive::from_image_with_spectrum(image, sig, &spectrum, MEMBERSHIP_TOL) {
            return x;
        }
    }
}

/// A unitary matrix from Gram-Schmidt on a Gaussian matrix.
pub fn sample_unitary<T: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix<T> {
    loop {
        let g = sample_matrix::<T, _>(rng, n, n);
        if let Some(u) = gram_schmidt(&g) {
            return u;
        }
    }
}

fn gram_schmidt<T: Scalar>(g: &Matrix<T>) -> Option<Matrix<T>> {
    let n = g.rows();
    let mut cols: Vec<Vec<T>> = Vec::with_capacity(n);
    for k in 0..n {
        let mut v: Vec<T> = (0..n).map(|i| g[(i, k)]).collect();
        for _ in 0..2 {
            for e in &cols {
                let mut coef = T::zero();
                for (a, b) in e.iter().zip(&v) {
                    coef += a.conj() * *b;
                }
                for (vi, ei) in v.iter_mut().zip(e) {
                    *vi -= *ei * coef;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return None;
        }
        cols.push(v.into_iter().map(|z| z.scale(1.0 / norm)).collect());
    }
    Some(Matrix::from_fn(n, n, |i, k| cols[k][i]))
}

/// `diag(U_p, U_q)` with independent random unitary blocks.
pub fn sample_kj<T: Scalar, R: Rng + ?Sized>(rng: &mut R, sig: Signature) -> Matrix<T> {
    let (p, q) = (sig.p(), sig.q());
    let up = sample_unitary::<T, _>(rng, p);
    let uq = sample_unitary::<T, _>(rng, q);
    Matrix::from_blocks(&up, &Matrix::zeros(p, q), &Matrix::zeros(q, p), &uq)
}

/// `(X + X^#) / 2` for a Gaussian `X`.
pub fn sample_j_hermitian<T: Scalar, R: Rng + ?Sized>(rng: &mut R, sig: Signature) -> Matrix<T> {
    let x = sample_matrix::<T, _>(rng, sig.n(), sig.n());
    (&x + &sharp(&x, sig).expect("dimension matches")).scale(0.5)
}

pub fn random_pj<T: Field>(sig: Signature, seed: u64) -> JPositive<T> {
    sample_pj(&mut rng_from_seed(seed), sig)
}

pub fn random_kj<T: Scalar>(sig: Signature, seed: u64) -> Matrix<T> {
    sample_kj(&mut rng_from_seed(seed), sig)
}

pub fn random_j_hermitian<T: Scalar>(sig: Signature, seed: u64) -> Matrix<T> {
    sample_j_hermitian(&mut rng_from_seed(seed), sig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jstruct::{is_in_k_j, is_j_hermitian, is_j_positive};
    use crate::scalars::Quaternion;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sig(p: usize, q: usize) -> Signature {
        Signature::new(p, q).unwrap()
    }

    fn real(rows: Vec<Vec<f64>>) -> Matrix<f64> {
        Matrix::from_rows(rows).unwrap()
    }

    fn dist<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> f64 {
        (a - b).frobenius_norm() / a.frobenius_norm().max(b.frobenius_norm()).max(1.0)
    }

    #[test]
    fn bullet_examples() {
        let s = sig(1, 1);
        let a = real(vec![vec![2.0, 1.0], vec![-1.0, -2.0]]);
        assert_eq!(bullet(&s.j(), &a, s).unwrap(), a);
        assert_eq!(bullet(&a, &s.j(), s).unwrap(), a);
        let x = Matrix::<f64>::from_real_diag(&[2.0, -3.0]);
        let y = Matrix::<f64>::from_real_diag(&[8.0, -27.0]);
        assert_eq!(bullet(&x, &y, s).unwrap(), Matrix::from_real_diag(&[16.0, -81.0]));
    }

    #[test]
    fn bullet_inverse_examples() {
        let s = sig(1, 1);
        assert_eq!(bullet_inverse(&s.j::<f64>(), s).unwrap(), s.j());
        let inv = bullet_inverse(&Matrix::<f64>::from_real_diag(&[2.0, -3.0]), s).unwrap();
        assert!(dist(&inv, &Matrix::from_real_diag(&[0.5, -1.0 / 3.0])) < 1e-15);
        let s = sig(2, 1);
        let a = sample_gl::<Quaternion, _>(&mut rng_from_seed(1), 3);
        let ai = bullet_inverse(&a, s).unwrap();
        assert!(dist(&bullet(&a, &ai, s).unwrap(), &s.j()) < 1e-10);
        assert!(dist(&bullet(&ai, &a, s).unwrap(), &s.j()) < 1e-10);
        assert!(matches!(bullet_inverse(&Matrix::<f64>::zeros(3, 3), s), Err(Error::Singular { .. })));
    }

    #[test]
    fn bullet_associativity() {
        let s = sig(1, 2);
        let mut rng = rng_from_seed(2);
        let a = sample_matrix::<Complex64, _>(&mut rng, 3, 3);
        let b = sample_matrix::<Complex64, _>(&mut rng, 3, 3);
        let cc = sample_matrix::<Complex64, _>(&mut rng, 3, 3);
        let lhs = bullet(&bullet(&a, &b, s).unwrap(), &cc, s).unwrap();
        let rhs = bullet(&a, &bullet(&b, &cc, s).unwrap(), s).unwrap();
        assert!(dist(&lhs, &rhs) < 1e-13);
    }

    #[test]
    fn commutator_examples() {
        let s = sig(1, 1);
        let x = random_j_hermitian::<f64>(s, 3);
        assert_eq!(bullet_commutator(&x, &x, s).unwrap().frobenius_norm(), 0.0);
        assert!(bullet_commutator(&s.j(), &x, s).unwrap().frobenius_norm() < 1e-15);
        let a = real(vec![vec![2.0, 1.0], vec![-1.0, -2.0]]);
        let b = real(vec![vec![3.0, 1.0], vec![-1.0, -1.0]]);
        // ordinary product commutes, the bullet product does not
        assert_eq!(&a * &b, &b * &a);
        let comm = bullet_commutator(&a, &b, s).unwrap();
        // A J B = [[7, 3], [-5, -3]], B J A = [[7, 5], [-3, -3]]
        assert_eq!(comm, real(vec![vec![0.0, -2.0], vec![-2.0, 0.0]]));
    }

    #[test]
    fn exp_examples() {
        let s = sig(1, 1);
        assert_eq!(exp_j(&Matrix::<f64>::zeros(2, 2), s).unwrap().matrix(), &s.j());
        let x = Matrix::from_rows(vec![vec![c(0.0, 0.0), c(0.0, 1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]]).unwrap();
        let e = exp_j(&x, s).unwrap();
        let (ch, sh) = (1f64.cosh(), 1f64.sinh());
        let expected = Matrix::from_rows(vec![vec![c(ch, 0.0), c(0.0, sh)], vec![c(0.0, sh), c(-ch, 0.0)]]).unwrap();
        assert!((e.matrix() - &expected).frobenius_norm() < 1e-13);
        let d = Matrix::<f64>::from_real_diag(&[2f64.ln(), -(3f64.ln())]);
        let e = exp_j(&d, s).unwrap();
        assert!(dist(e.matrix(), &Matrix::from_real_diag(&[2.0, -3.0])) < 1e-15);
        assert!(matches!(exp_j(&real(vec![vec![0.0, 1.0], vec![1.0, 0.0]]), s), Err(Error::NotJHermitian { .. })));
    }

    #[test]
    fn log_examples() {
        let s = sig(1, 1);
        let unit = JPositive::<f64>::unit(s);
        assert_eq!(log_j(&unit).unwrap().frobenius_norm(), 0.0);
        let x = is_j_positive(&Matrix::<f64>::from_real_diag(&[2.0, -3.0]), s, 1e-10).unwrap();
        let l = log_j(&x).unwrap();
        assert!(dist(&l, &Matrix::from_real_diag(&[2f64.ln(), -(3f64.ln())])) < 1e-15);
        for seed in 0..10 {
            let s = sig(2, 2);
            let x = random_pj::<Quaternion>(s, seed);
            let l = log_j(&x).unwrap();
            assert!(is_j_hermitian(&l, s, 1e-10).unwrap());
            assert!(dist(exp_j(&l, s).unwrap().matrix(), x.matrix()) < 1e-9);
        }
    }

    #[test]
    fn pow_examples() {
        let s = sig(1, 1);
        let x = random_pj::<Complex64>(s, 5);
        assert_eq!(pow_j(&x, 0.0).unwrap().matrix(), &s.j());
        assert_eq!(pow_j(&x, 1.0).unwrap(), x);
        let d = is_j_positive(&Matrix::<f64>::from_real_diag(&[16.0, -81.0]), s, 1e-10).unwrap();
        let r = pow_j(&d, 0.5).unwrap();
        assert!(dist(r.matrix(), &Matrix::from_real_diag(&[4.0, -9.0])) < 1e-15);
        let back = pow_j(&pow_j(&x, 0.5).unwrap(), 2.0).unwrap();
        assert!(dist(back.matrix(), x.matrix()) < 1e-10);
        assert!(matches!(pow_j(&x, 33.0), Err(Error::ExponentOutOfRange(_))));
        assert!(matches!(pow_j(&x, f64::NAN), Err(Error::ExponentOutOfRange(_))));
    }

    fn pow_laws<T: Field>(s: Signature, seed: u64) {
        let x = random_pj::<T>(s, seed);
        let (t, u, alpha) = (0.7, -1.3, 0.25);
        let lhs = pow_j(&pow_j(&x, t).unwrap(), u).unwrap();
        assert!(dist(lhs.matrix(), pow_j(&x, t * u).unwrap().matrix()) < 1e-9);
        let ll = log_j(&pow_j(&x, t).unwrap()).unwrap();
        assert!(dist(&ll, &log_j(&x).unwrap().scale(t)) < 1e-9);
        let inv_pow = pow_j(&x.inverse().unwrap(), t).unwrap();
        let pow_inv = pow_j(&x, t).unwrap().inverse().unwrap();
        assert!(dist(inv_pow.matrix(), pow_inv.matrix()) < 1e-9);
        let split = bullet(pow_j(&x, alpha * t).unwrap().matrix(), pow_j(&x, (1.0 - alpha) * t).unwrap().matrix(), s).unwrap();
        assert!(dist(&split, pow_j(&x, t).unwrap().matrix()) < 1e-9);
        let unit = bullet(pow_j(&x, t).unwrap().matrix(), pow_j(&x, -t).unwrap().matrix(), s).unwrap();
        assert!(dist(&unit, &s.j()) < 1e-9);
    }

    #[test]
    fn power_laws_all_fields() {
        for seed in 0..8 {
            pow_laws::<f64>(sig(2, 1), seed);
            pow_laws::<Complex64>(sig(1, 2), seed);
            pow_laws::<Quaternion>(sig(2, 2), seed);
        }
    }

    #[test]
    fn polar_examples() {
        let s = sig(1, 1);
        let (k, p) = polar_decompose_bullet(&Matrix::<f64>::identity(2), s).unwrap();
        assert!(dist(&k, &Matrix::identity(2)) < 1e-15);
        assert!(dist(p.matrix(), &s.j()) < 1e-15);
        let u = sample_unitary::<Complex64, _>(&mut rng_from_seed(4), 2);
        let (_, p) = polar_decompose_bullet(&u, s).unwrap();
        assert!(dist(p.matrix(), &s.j()) < 1e-12);
        for seed in 0..10 {
            let s = sig(2, 1);
            let g = sample_gl::<Quaternion, _>(&mut rng_from_seed(seed), 3);
            let (k, p) = polar_decompose_bullet(&g, s).unwrap();
            assert!((&bullet(&k, p.matrix(), s).unwrap() - &g).frobenius_norm() <= 1e-9 * g.frobenius_norm());
            assert!(dist(&(&k.adjoint() * &k), &Matrix::identity(3)) < 1e-10);
        }
        assert!(polar_decompose_bullet(&Matrix::<f64>::zeros(2, 2), s).is_err());
    }

    #[test]
    fn samplers() {
        let s = sig(2, 2);
        assert_eq!(random_pj::<Quaternion>(s, 7), random_pj::<Quaternion>(s, 7));
        assert_ne!(random_pj::<Quaternion>(s, 7), random_pj::<Quaternion>(s, 8));
        let mut rng = rng_from_seed(0);
        for _ in 0..500 {
            let x = sample_pj::<Complex64, _>(&mut rng, s);
            assert!(is_j_positive(x.matrix(), s, 1e-10).is_ok());
        }
        for seed in 0..20 {
            let g = random_kj::<Quaternion>(sig(2, 1), seed);
            assert!(is_in_k_j(&g, sig(2, 1), 1e-10).unwrap());
            let h = random_j_hermitian::<Complex64>(sig(1, 3), seed);
            assert!(is_j_hermitian(&h, sig(1, 3), 1e-12).unwrap());
        }
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
    }
}
