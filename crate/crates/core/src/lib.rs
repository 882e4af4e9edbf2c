//! Matrix calculus on the cone of J-positive matrices.
//!
//! For a signature `(p, q)` let `J = diag(Id_p, -Id_q)`. A matrix `X` is
//! J-Hermitian when `X = J X* J`, and J-positive when in addition `J X` is
//! positive definite. The map `X -> J X` carries the J-positive cone onto
//! the classical cone of positive definite matrices, and every construction
//! here (exponential, powers, geodesics, geometric means) is the pullback
//! of its classical counterpart along that map.
//!
//! Everything works over the reals, the complex numbers and the quaternions
//! (see [`scalars::Scalar`] and [`matcore::Field`]).

// Negated comparisons such as `!(x > 0.0)` are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod geometry;
pub mod jcalc;
pub mod jstruct;
pub mod matfile;
pub mod matcore;
pub mod means;
pub mod order;
pub mod propcheck;
pub mod scalars;

pub use error::{Error, Result};
pub use matcore::{Field, Matrix, SpectralDecomposition};
pub use num_complex::Complex64;
pub use scalars::{Quaternion, Scalar, ScalarField};
pub use jstruct::{JPositive, Signature};
