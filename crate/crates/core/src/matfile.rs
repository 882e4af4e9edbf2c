//! JSON encoding of matrices.
//!
//! A matrix file is a single object with keys in sorted order:
//!
//! ```json
//! {"cols":2,"data":[[2,0],[0,-3]],"field":"R","rows":2}
//! ```
//!
//! Real entries are bare numbers, complex entries are `[re, im]` and
//! quaternion entries are `[a, b, c, d]` for `a + b i + c j + d k`. Numbers
//! are printed like C's `%.17g`, which round-trips every finite `f64`.

use std::io;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::matcore::Matrix;
use crate::scalars::{Quaternion, Scalar, ScalarField};
use crate::{Error, Result};

/// One encoded scalar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Parts(Vec<f64>),
}

impl Entry {
    fn components(&self) -> &[f64] {
        match self {
            Entry::Real(x) => std::slice::from_ref(x),
            Entry::Parts(v) => v,
        }
    }
}

/// The on-disk matrix format.
///
/// Field order matches the sorted key order of the canonical encoding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub cols: usize,
    pub data: Vec<Vec<Entry>>,
    pub field: ScalarField,
    pub rows: usize,
}

impl MatrixFile {
    pub fn from_matrix<T: Scalar>(m: &Matrix<T>) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::Parse("matrix has non-finite entries".into()));
        }
        let data = m
            .to_rows()
            .into_iter()
            .map(|row| {
                row.into_iter()
                    // adding +0 turns a negative zero into a positive one
                    .map(|z| match T::FIELD {
                        ScalarField::R => Entry::Real(z.re() + 0.0),
                        _ => Entry::Parts(z.components().into_iter().map(|c| c + 0.0).collect()),
                    })
                    .collect()
            })
            .collect();
        Ok(MatrixFile { cols: m.cols(), data, field: T::FIELD, rows: m.rows() })
    }

    /// Checks shape, squareness and entry arity.
    pub fn validate(&self) -> Result<()> {
        if self.rows != self.cols {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        if self.rows == 0 {
            return Err(Error::Parse("empty matrix".into()));
        }
        if self.data.len() != self.rows {
            return Err(Error::Parse(format!("expected {} rows, found {}", self.rows, self.data.len())));
        }
        let arity = self.field.real_dim();
        for (i, row) in self.data.iter().enumerate() {
            if row.len() != self.cols {
                return Err(Error::Parse(format!("row {i}: expected {} entries, found {}", self.cols, row.len())));
            }
            for (j, e) in row.iter().enumerate() {
                let ok = match (self.field, e) {
                    (ScalarField::R, Entry::Real(_)) => true,
                    (ScalarField::R, Entry::Parts(_)) => false,
                    (_, e) => e.components().len() == arity,
                };
                if !ok {
                    return Err(Error::Parse(format!("entry ({i},{j}) does not encode a {} scalar", self.field)));
                }
                if !e.components().iter().all(|x| x.is_finite()) {
                    return Err(Error::Parse(format!("entry ({i},{j}) is not finite")));
                }
            }
        }
        Ok(())
    }

    /// Decodes into field `T`, promoting from a smaller field when needed.
    pub fn to_matrix<T: Scalar>(&self) -> Result<Matrix<T>> {
        self.validate()?;
        if self.field > T::FIELD {
            return Err(Error::Parse(format!("cannot read a {} matrix as {}", self.field, T::FIELD)));
        }
        let width = T::FIELD.real_dim();
        let mut data = Vec::with_capacity(self.rows * self.cols);
        for row in &self.data {
            for e in row {
                let mut c = e.components().to_vec();
                c.resize(width, 0.0);
                data.push(T::from_components(&c).ok_or_else(|| Error::Parse("bad scalar arity".into()))?);
            }
        }
        Matrix::from_vec(self.rows, self.cols, data)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: MatrixFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.validate()?;
        Ok(file)
    }

    /// Canonical single-line encoding without a trailing newline.
    pub fn to_json(&self) -> Result<String> {
        self.validate()?;
        to_canonical_json(self)
    }
}

/// A decoded matrix whose field is only known at run time.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyMatrix {
    R(Matrix<f64>),
    C(Matrix<Complex64>),
    H(Matrix<Quaternion>),
}

impl AnyMatrix {
    pub fn field(&self) -> ScalarField {
        match self {
            AnyMatrix::R(_) => ScalarField::R,
            AnyMatrix::C(_) => ScalarField::C,
            AnyMatrix::H(_) => ScalarField::H,
        }
    }

    /// Decodes in the file's own field.
    pub fn from_file(file: &MatrixFile) -> Result<Self> {
        Self::from_file_as(file, file.field)
    }

    /// Decodes in `field`, which must contain the file's field.
    pub fn from_file_as(file: &MatrixFile, field: ScalarField) -> Result<Self> {
        Ok(match field {
            ScalarField::R => AnyMatrix::R(file.to_matrix()?),
            ScalarField::C => AnyMatrix::C(file.to_matrix()?),
            ScalarField::H => AnyMatrix::H(file.to_matrix()?),
        })
    }

    pub fn to_file(&self) -> Result<MatrixFile> {
        match self {
            AnyMatrix::R(m) => MatrixFile::from_matrix(m),
            AnyMatrix::C(m) => MatrixFile::from_matrix(m),
            AnyMatrix::H(m) => MatrixFile::from_matrix(m),
        }
    }
}

/// `%.17g` formatting of a finite float.
pub fn format_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        trim_fraction(&format!("{x:.*}", (16 - exp) as usize)).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Compact JSON formatter that prints floats with [`format_g17`].
#[derive(Debug, Default, Clone, Copy)]
pub struct G17Formatter;

impl Formatter for G17Formatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_g17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes compactly with [`G17Formatter`]. Non-finite floats become `null`.
pub fn to_canonical_json<S: Serialize + ?Sized>(value: &S) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, G17Formatter);
    value.serialize(&mut ser).map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(out).map_err(|e| Error::Parse(e.to_string()))
}

/// A matrix as a JSON value in the canonical encoding.
pub fn matrix_value<T: Scalar>(m: &Matrix<T>) -> serde_json::Value {
    match MatrixFile::from_matrix(m) {
        Ok(f) => serde_json::to_value(f).unwrap_or(serde_json::Value::Null),
        Err(e) => serde_json::Value::String(e.to_string()),
    }
}
