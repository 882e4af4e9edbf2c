//! The three real division algebras R, C and H.
//!
//! [`Scalar`] abstracts over `f64`, [`Complex64`] and [`Quaternion`]. Matrix
//! kernels never assume commutativity: products are always formed in the
//! order they appear, so the same code is valid over H.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Tag for the scalar field, ordered by generality `R < C < H`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ScalarField {
    R,
    C,
    H,
}

impl ScalarField {
    pub fn as_str(self) -> &'static str {
        match self {
            ScalarField::R => "R",
            ScalarField::C => "C",
            ScalarField::H => "H",
        }
    }

    /// Number of real coordinates per scalar.
    pub fn real_dim(self) -> usize {
        match self {
            ScalarField::R => 1,
            ScalarField::C => 2,
            ScalarField::H => 4,
        }
    }

    /// The smallest field containing both.
    pub fn promote(self, other: ScalarField) -> ScalarField {
        self.max(other)
    }
}

impl std::str::FromStr for ScalarField {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "R" | "r" => Ok(ScalarField::R),
            "C" | "c" => Ok(ScalarField::C),
            "H" | "h" => Ok(ScalarField::H),
            other => Err(crate::Error::Parse(format!("unknown field `{other}`"))),
        }
    }
}

impl std::fmt::Display for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Arithmetic shared by R, C and H.
pub trait Scalar:
    Copy
    + Debug
    + Default
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    const FIELD: ScalarField;

    fn zero() -> Self {
        Self::default()
    }
    fn one() -> Self {
        Self::from_real(1.0)
    }
    fn from_real(x: f64) -> Self;
    /// Conjugation.
    fn conj(self) -> Self;
    /// Real part; coincides with the reduced trace of a scalar.
    fn re(self) -> f64;
    fn norm_sqr(self) -> f64;
    fn abs(self) -> f64 {
        self.norm_sqr().sqrt()
    }
    fn scale(self, s: f64) -> Self;
    /// Two-sided inverse `conj(x) / |x|^2`.
    fn recip(self) -> Self {
        self.conj().scale(1.0 / self.norm_sqr())
    }
    /// Real coordinates in the canonical basis (1; 1, i; 1, i, j, k).
    fn components(self) -> Vec<f64>;
    /// Inverse of [`Scalar::components`]; `None` on a length mismatch.
    fn from_components(c: &[f64]) -> Option<Self>;
    /// Independent standard normal draw per real coordinate.
    fn sample_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    fn is_finite(self) -> bool {
        self.components().iter().all(|x| x.is_finite())
    }
}

impl Scalar for f64 {
    const FIELD: ScalarField = ScalarField::R;

    fn from_real(x: f64) -> Self {
        x
    }
    fn conj(self) -> Self {
        self
    }
    fn re(self) -> f64 {
        self
    }
    fn norm_sqr(self) -> f64 {
        self * self
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn recip(self) -> Self {
        1.0 / self
    }
    fn components(self) -> Vec<f64> {
        vec![self]
    }
    fn from_components(c: &[f64]) -> Option<Self> {
        match c {
            [x] => Some(*x),
            _ => None,
        }
    }
    fn sample_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }
}

impl Scalar for Complex64 {
    const FIELD: ScalarField = ScalarField::C;

    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
    fn abs(self) -> f64 {
        self.norm()
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn components(self) -> Vec<f64> {
        vec![self.re, self.im]
    }
    fn from_components(c: &[f64]) -> Option<Self> {
        match c {
            [re, im] => Some(Complex64::new(*re, *im)),
            _ => None,
        }
    }
    fn sample_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    }
}

/// A real quaternion `a + b i + c j + d k`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Quaternion {
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Quaternion { a, b, c, d }
    }

    /// `z1 + z2 j` with `z1, z2` complex.
    pub fn from_complex_pair(z1: Complex64, z2: Complex64) -> Self {
        Quaternion::new(z1.re, z1.im, z2.re, z2.im)
    }

    /// The pair `(z1, z2)` with `self = z1 + z2 j`.
    pub fn complex_pair(self) -> (Complex64, Complex64) {
        (Complex64::new(self.a, self.b), Complex64::new(self.c, self.d))
    }

    pub fn conj(self) -> Self {
        Quaternion::new(self.a, -self.b, -self.c, -self.d)
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    /// Reduced trace, equal to the real part.
    pub fn trd(self) -> f64 {
        self.a
    }

    pub fn imag(self) -> Quaternion {
        Quaternion::new(0.0, self.b, self.c, self.d)
    }

    /// Writes `self = re + b u` with `u^2 = -1` and `b = |Im(self)| > 0`.
    /// Returns `None` for real quaternions, where `u` is not unique.
    pub fn polar_split(self) -> Option<(f64, f64, Quaternion)> {
        let im = self.imag();
        let b = im.norm();
        if b == 0.0 {
            return None;
        }
        Some((self.a, b, im.scale(1.0 / b)))
    }

    pub fn scale(self, s: f64) -> Self {
        Quaternion::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    /// The 2x2 complex matrix `[[z1, z2], [-conj(z2), conj(z1)]]` as row-major entries.
    pub fn psi(self) -> [[Complex64; 2]; 2] {
        let (z1, z2) = self.complex_pair();
        [[z1, z2], [-z2.conj(), z1.conj()]]
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.a, -self.b, -self.c, -self.d)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, o: Quaternion) -> Quaternion {
        let (a1, b1, c1, d1) = (self.a, self.b, self.c, self.d);
        let (a2, b2, c2, d2) = (o.a, o.b, o.c, o.d);
        Quaternion::new(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Quaternion) {
        *self = *self + o;
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, o: Quaternion) {
        *self = *self - o;
    }
}

impl std::fmt::Display for Quaternion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} + {}i + {}j + {}k", self.a, self.b, self.c, self.d)
    }
}

impl Scalar for Quaternion {
    const FIELD: ScalarField = ScalarField::H;

    fn from_real(x: f64) -> Self {
        Quaternion::new(x, 0.0, 0.0, 0.0)
    }
    fn conj(self) -> Self {
        Quaternion::conj(self)
    }
    fn re(self) -> f64 {
        self.a
    }
    fn norm_sqr(self) -> f64 {
        Quaternion::norm_sqr(self)
    }
    fn scale(self, s: f64) -> Self {
        Quaternion::scale(self, s)
    }
    fn components(self) -> Vec<f64> {
        vec![self.a, self.b, self.c, self.d]
    }
    fn from_components(c: &[f64]) -> Option<Self> {
        match c {
            [a, b, c, d] => Some(Quaternion::new(*a, *b, *c, *d)),
            _ => None,
        }
    }
    fn sample_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Quaternion::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        )
    }
}

/// Componentwise comparison with absolute tolerance `tol * max(1, |p|, |q|)`.
pub fn approx_eq<T: Scalar>(p: T, q: T, tol: f64) -> bool {
    let scale = 1f64.max(p.abs()).max(q.abs());
    p.components()
        .iter()
        .zip(q.components())
        .all(|(x, y)| (x - y).abs() <= tol * scale)
}
