//! Python bindings for `jcone`.
//!
//! Matrices cross the boundary as nested lists. The scalar field is chosen by a
//! `field` argument: `"R"` takes floats, `"C"` takes complex numbers and `"H"`
//! takes [`Quaternion`](PyQuaternion) objects or 4-sequences `(a, b, c, d)`.
//! Results use the same encoding, with quaternion entries returned as
//! `Quaternion` objects. A signature is a pair `(p, q)`.

use jcone::geometry::{geodesic as geodesic_rs, geodesic_distance};
use jcone::jcalc::{self, exp_j as exp_j_rs, log_j as log_j_rs, pow_j as pow_j_rs};
use jcone::means::{riccati_residual, riccati_solve as riccati_solve_rs, weighted_mean as weighted_mean_rs};
use jcone::order::j_leq as j_leq_rs;
use jcone::propcheck;
use jcone::{Complex64, Field, JPositive, Matrix, Quaternion, ScalarField, Signature};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

/// Default membership tolerance, as in the command-line tool.
const DEFAULT_TOL: f64 = 1e-9;

fn value_error(e: jcone::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A real quaternion `a + b i + c j + d k`.
#[pyclass(name = "Quaternion", module = "pyjcone", frozen, eq, skip_from_py_object)]
#[derive(Clone, Copy, PartialEq)]
struct PyQuaternion {
    inner: Quaternion,
}

#[pymethods]
impl PyQuaternion {
    #[new]
    #[pyo3(signature = (a = 0.0, b = 0.0, c = 0.0, d = 0.0))]
    fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        PyQuaternion { inner: Quaternion::new(a, b, c, d) }
    }

    #[getter]
    fn a(&self) -> f64 {
        self.inner.a
    }

    #[getter]
    fn b(&self) -> f64 {
        self.inner.b
    }

    #[getter]
    fn c(&self) -> f64 {
        self.inner.c
    }

    #[getter]
    fn d(&self) -> f64 {
        self.inner.d
    }

    fn components(&self) -> (f64, f64, f64, f64) {
        let q = self.inner;
        (q.a, q.b, q.c, q.d)
    }

    fn conj(&self) -> Self {
        PyQuaternion { inner: self.inner.conj() }
    }

    fn norm(&self) -> f64 {
        self.inner.norm()
    }

    fn __add__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyQuaternion { inner: self.inner + quaternion_from(other)? })
    }

    fn __sub__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyQuaternion { inner: self.inner - quaternion_from(other)? })
    }

    fn __mul__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyQuaternion { inner: self.inner * quaternion_from(other)? })
    }

    fn __rmul__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyQuaternion { inner: quaternion_from(other)? * self.inner })
    }

    fn __neg__(&self) -> Self {
        PyQuaternion { inner: -self.inner }
    }

    fn __repr__(&self) -> String {
        let q = self.inner;
        format!("Quaternion({}, {}, {}, {})", q.a, q.b, q.c, q.d)
    }
}

fn quaternion_from(obj: &Bound<'_, PyAny>) -> PyResult<Quaternion> {
    if let Ok(q) = obj.extract::<PyRef<'_, PyQuaternion>>() {
        return Ok(q.inner);
    }
    if let Ok(x) = obj.extract::<f64>() {
        return Ok(Quaternion::new(x, 0.0, 0.0, 0.0));
    }
    let (a, b, c, d) = obj
        .extract::<(f64, f64, f64, f64)>()
        .map_err(|_| PyValueError::new_err("expected a Quaternion, a real number or a 4-tuple"))?;
    Ok(Quaternion::new(a, b, c, d))
}

/// Scalars that can cross the Python boundary.
trait PyScalar: Field {
    fn from_py(obj: &Bound<'_, PyAny>) -> PyResult<Self>;
    fn to_py<'py>(self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>>;
}

impl PyScalar for f64 {
    fn from_py(obj: &Bound<'_, PyAny>) -> PyResult<Self> {
        obj.extract()
    }

    fn to_py<'py>(self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        Ok(self.into_pyobject(py)?.into_any())
    }
}

impl PyScalar for Complex64 {
    fn from_py(obj: &Bound<'_, PyAny>) -> PyResult<Self> {
        obj.extract()
    }

    fn to_py<'py>(self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        Ok(self.into_pyobject(py)?.into_any())
    }
}

impl PyScalar for Quaternion {
    fn from_py(obj: &Bound<'_, PyAny>) -> PyResult<Self> {
        quaternion_from(obj)
    }

    fn to_py<'py>(self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        Ok(Bound::new(py, PyQuaternion { inner: self })?.into_any())
    }
}

fn matrix_from<T: PyScalar>(obj: &Bound<'_, PyAny>) -> PyResult<Matrix<T>> {
    let rows: Vec<Vec<Bound<'_, PyAny>>> = obj.extract()?;
    let rows = rows
        .iter()
        .map(|row| row.iter().map(T::from_py).collect::<PyResult<Vec<T>>>())
        .collect::<PyResult<Vec<_>>>()?;
    Matrix::from_rows(rows).map_err(value_error)
}

fn matrix_to<'py, T: PyScalar>(py: Python<'py>, m: &Matrix<T>) -> PyResult<Bound<'py, PyAny>> {
    let rows = m
        .to_rows()
        .into_iter()
        .map(|row| {
            let items = row.into_iter().map(|z| z.to_py(py)).collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, items)
        })
        .collect::<PyResult<Vec<_>>>()?;
    Ok(PyList::new(py, rows)?.into_any())
}

fn signature_from(sig: (usize, usize)) -> PyResult<Signature> {
    Signature::new(sig.0, sig.1).map_err(value_error)
}

fn field_from(field: &str) -> PyResult<ScalarField> {
    field.parse().map_err(value_error)
}

fn cone_point<T: PyScalar>(obj: &Bound<'_, PyAny>, sig: Signature, tol: f64) -> PyResult<JPositive<T>> {
    JPositive::new(matrix_from(obj)?, sig, tol).map_err(value_error)
}

macro_rules! by_field {
    ($field:expr, $f:ident($($arg:expr),* $(,)?)) => {
        match field_from($field)? {
            ScalarField::R => $f::<f64>($($arg),*),
            ScalarField::C => $f::<Complex64>($($arg),*),
            ScalarField::H => $f::<Quaternion>($($arg),*),
        }
    };
}

fn exp_j_t<'py, T: PyScalar>(py: Python<'py>, x: &Bound<'py, PyAny>, sig: Signature) -> PyResult<Bound<'py, PyAny>> {
    let e = exp_j_rs(&matrix_from::<T>(x)?, sig).map_err(value_error)?;
    matrix_to(py, e.matrix())
}

/// `exp_J(X) = J exp(J X)` for a J-Hermitian `X`.
#[pyfunction]
#[pyo3(signature = (x, signature, field = "R"))]
fn exp_j<'py>(py: Python<'py>, x: &Bound<'py, PyAny>, signature: (usize, usize), field: &str) -> PyResult<Bound<'py, PyAny>> {
    let sig = signature_from(signature)?;
    by_field!(field, exp_j_t(py, x, sig))
}

fn log_j_t<'py, T: PyScalar>(py: Python<'py>, x: &Bound<'py, PyAny>, sig: Signature, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let l = log_j_rs(&cone_point::<T>(x, sig, tol)?).map_err(value_error)?;
    matrix_to(py, &l)
}

/// `log_J(X) = J log(J X)` for a J-positive `X`.
#[pyfunction]
#[pyo3(signature = (x, signature, field = "R", tol = DEFAULT_TOL))]
fn log_j<'py>(py: Python<'py>, x: &Bound<'py, PyAny>, signature: (usize, usize), field: &str, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let sig = signature_from(signature)?;
    by_field!(field, log_j_t(py, x, sig, tol))
}

fn pow_j_t<'py, T: PyScalar>(py: Python<'py>, x: &Bound<'py, PyAny>, t: f64, sig: Signature, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let p = pow_j_rs(&cone_point::<T>(x, sig, tol)?, t).map_err(value_error)?;
    matrix_to(py, p.matrix())
}

/// `X^t_J = J (J X)^t` for a J-positive `X`.
#[pyfunction]
#[pyo3(signature = (x, t, signature, field = "R", tol = DEFAULT_TOL))]
fn pow_j<'py>(py: Python<'py>, x: &Bound<'py, PyAny>, t: f64, signature: (usize, usize), field: &str, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let sig = signature_from(signature)?;
    by_field!(field, pow_j_t(py, x, t, sig, tol))
}

type PairResult<'py> = PyResult<(Bound<'py, PyAny>, Option<f64>)>;

fn mean_t<'py, T: PyScalar>(py: Python<'py>, a: &Bound<'py, PyAny>, b: &Bound<'py, PyAny>, t: f64, sig: Signature, tol: f64) -> PairResult<'py> {
    let (a, b) = (cone_point::<T>(a, sig, tol)?, cone_point::<T>(b, sig, tol)?);
    let r = weighted_mean_rs(&a, &b, t).map_err(value_error)?;
    Ok((matrix_to(py, r.mean.matrix())?, r.riccati_residual))
}

/// The weighted J-geometric mean. Returns `(mean, riccati_residual)`; the residual is `None` unless `t = 0.5`.
#[pyfunction]
#[pyo3(signature = (a, b, signature, t = 0.5, field = "R", tol = DEFAULT_TOL))]
fn weighted_mean<'py>(
    py: Python<'py>,
    a: &Bound<'py, PyAny>,
    b: &Bound<'py, PyAny>,
    signature: (usize, usize),
    t: f64,
    field: &str,
    tol: f64,
) -> PairResult<'py> {
    let sig = signature_from(signature)?;
    by_field!(field, mean_t(py, a, b, t, sig, tol))
}

fn riccati_t<'py, T: PyScalar>(py: Python<'py>, a: &Bound<'py, PyAny>, b: &Bound<'py, PyAny>, sig: Signature, tol: f64) -> PairResult<'py> {
    let (a, b) = (cone_point::<T>(a, sig, tol)?, cone_point::<T>(b, sig, tol)?);
    let m = riccati_solve_rs(&a, &b).map_err(value_error)?;
    let residual = riccati_residual(m.matrix(), &a, &b).map_err(value_error)?;
    Ok((matrix_to(py, m.matrix())?, Some(residual)))
}

/// The J-positive solution `M` of `M A^{-1} M = B`. Returns `(M, residual)`.
#[pyfunction]
#[pyo3(signature = (a, b, signature, field = "R", tol = DEFAULT_TOL))]
fn riccati_solve<'py>(
    py: Python<'py>,
    a: &Bound<'py, PyAny>,
    b: &Bound<'py, PyAny>,
    signature: (usize, usize),
    field: &str,
    tol: f64,
) -> PairResult<'py> {
    let sig = signature_from(signature)?;
    by_field!(field, riccati_t(py, a, b, sig, tol))
}

fn geodesic_t<'py, T: PyScalar>(py: Python<'py>, a: &Bound<'py, PyAny>, b: &Bound<'py, PyAny>, t: f64, sig: Signature, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let (a, b) = (cone_point::<T>(a, sig, tol)?, cone_point::<T>(b, sig, tol)?);
    let g = geodesic_rs(&a, &b, t).map_err(value_error)?;
    matrix_to(py, g.matrix())
}

/// The point at parameter `t` on the geodesic through `a` (t = 0) and `b` (t = 1).
#[pyfunction]
#[pyo3(signature = (a, b, t, signature, field = "R", tol = DEFAULT_TOL))]
fn geodesic<'py>(
    py: Python<'py>,
    a: &Bound<'py, PyAny>,
    b: &Bound<'py, PyAny>,
    t: f64,
    signature: (usize, usize),
    field: &str,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let sig = signature_from(signature)?;
    by_field!(field, geodesic_t(py, a, b, t, sig, tol))
}

fn distance_t<T: PyScalar>(a: &Bound<'_, PyAny>, b: &Bound<'_, PyAny>, sig: Signature, tol: f64) -> PyResult<f64> {
    let (a, b) = (cone_point::<T>(a, sig, tol)?, cone_point::<T>(b, sig, tol)?);
    geodesic_distance(&a, &b).map_err(value_error)
}

/// Riemannian distance between two J-positive matrices.
#[pyfunction]
#[pyo3(signature = (a, b, signature, field = "R", tol = DEFAULT_TOL))]
fn distance(a: &Bound<'_, PyAny>, b: &Bound<'_, PyAny>, signature: (usize, usize), field: &str, tol: f64) -> PyResult<f64> {
    let sig = signature_from(signature)?;
    by_field!(field, distance_t(a, b, sig, tol))
}

fn j_leq_t<T: PyScalar>(x: &Bound<'_, PyAny>, y: &Bound<'_, PyAny>, sig: Signature, tol: f64) -> PyResult<(bool, f64)> {
    let v = j_leq_rs(&matrix_from::<T>(x)?, &matrix_from::<T>(y)?, sig, tol).map_err(value_error)?;
    Ok((v.holds, v.margin))
}

/// Decides `X <=_J Y`. Returns `(holds, margin)`.
#[pyfunction]
#[pyo3(signature = (x, y, signature, field = "R", tol = DEFAULT_TOL))]
fn j_leq(x: &Bound<'_, PyAny>, y: &Bound<'_, PyAny>, signature: (usize, usize), field: &str, tol: f64) -> PyResult<(bool, f64)> {
    let sig = signature_from(signature)?;
    by_field!(field, j_leq_t(x, y, sig, tol))
}

fn is_j_positive_t<T: PyScalar>(x: &Bound<'_, PyAny>, sig: Signature, tol: f64) -> PyResult<bool> {
    let m = matrix_from::<T>(x)?;
    Ok(JPositive::new(m, sig, tol).is_ok())
}

/// Whether `X` is J-Hermitian with `J X` positive definite.
#[pyfunction]
#[pyo3(signature = (x, signature, field = "R", tol = DEFAULT_TOL))]
fn is_j_positive(x: &Bound<'_, PyAny>, signature: (usize, usize), field: &str, tol: f64) -> PyResult<bool> {
    let sig = signature_from(signature)?;
    by_field!(field, is_j_positive_t(x, sig, tol))
}

fn random_pj_t<'py, T: PyScalar>(py: Python<'py>, sig: Signature, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    matrix_to(py, jcalc::random_pj::<T>(sig, seed).matrix())
}

/// A random J-positive matrix, reproducible from `seed`.
#[pyfunction]
#[pyo3(signature = (signature, field = "R", seed = 0))]
fn random_pj<'py>(py: Python<'py>, signature: (usize, usize), field: &str, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let sig = signature_from(signature)?;
    by_field!(field, random_pj_t(py, sig, seed))
}

/// Runs a property suite and returns one dict per property.
#[pyfunction]
#[pyo3(signature = (suite, signature, field = "R", trials = 200, seed = 0, tol = 1e-8))]
fn run_suite<'py>(
    py: Python<'py>,
    suite: &str,
    signature: (usize, usize),
    field: &str,
    trials: usize,
    seed: u64,
    tol: f64,
) -> PyResult<Bound<'py, PyList>> {
    let sig = signature_from(signature)?;
    let field = field_from(field)?;
    let reports = propcheck::run_suite(suite, sig, field, sig.n(), trials, seed, tol).map_err(value_error)?;
    let json = py.import("json")?;
    let dicts = reports
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("property_id", &r.property_id)?;
            d.set_item("trials", r.trials)?;
            d.set_item("failures", r.failures)?;
            d.set_item("worst_margin", r.worst_margin)?;
            d.set_item("seed", r.seed)?;
            let counterexample = match &r.counterexample {
                Some(v) => json.call_method1("loads", (v.to_string(),))?,
                None => py.None().into_bound(py),
            };
            d.set_item("counterexample", counterexample)?;
            Ok(d)
        })
        .collect::<PyResult<Vec<_>>>()?;
    PyList::new(py, dicts)
}

#[pymodule]
fn pyjcone(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyQuaternion>()?;
    m.add_function(wrap_pyfunction!(exp_j, m)?)?;
    m.add_function(wrap_pyfunction!(log_j, m)?)?;
    m.add_function(wrap_pyfunction!(pow_j, m)?)?;
    m.add_function(wrap_pyfunction!(weighted_mean, m)?)?;
    m.add_function(wrap_pyfunction!(riccati_solve, m)?)?;
    m.add_function(wrap_pyfunction!(geodesic, m)?)?;
    m.add_function(wrap_pyfunction!(distance, m)?)?;
    m.add_function(wrap_pyfunction!(j_leq, m)?)?;
    m.add_function(wrap_pyfunction!(is_j_positive, m)?)?;
    m.add_function(wrap_pyfunction!(random_pj, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}
