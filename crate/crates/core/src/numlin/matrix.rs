//! Dense complex matrices.
//!
//! Every operator in the crate is a [`DenseMatrix`]: a row/column shaped
//! block of `Complex64` entries. Real inputs are embedded with zero
//! imaginary parts. Constructors that accept external data reject NaN and
//! infinite entries; arithmetic between finite matrices stays in the type.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{shape_mismatch, Error, Result};

pub type Scalar = Complex64;

#[inline]
pub const fn c64(re: f64, im: f64) -> Scalar {
    Complex64::new(re, im)
}

pub const ZERO: Scalar = c64(0.0, 0.0);
pub const ONE: Scalar = c64(1.0, 0.0);
pub const I: Scalar = c64(0.0, 1.0);

#[derive(Clone, PartialEq)]
pub struct DenseMatrix(DMatrix<Scalar>);

impl DenseMatrix {
    /// Wraps an nalgebra matrix, rejecting non-finite entries.
    pub fn new(inner: DMatrix<Scalar>) -> Result<Self> {
        check_finite(&inner)?;
        Ok(Self(inner))
    }

    pub(crate) fn from_inner(inner: DMatrix<Scalar>) -> Self {
        Self(inner)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Scalar) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    /// Row-major complex entries.
    pub fn from_row_slice(rows: usize, cols: usize, entries: &[Scalar]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(rows, cols, entries))
    }

    /// Row-major real entries.
    pub fn from_real_row_slice(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        let complex: Vec<Scalar> = entries.iter().map(|&x| c64(x, 0.0)).collect();
        Self::from_row_slice(rows, cols, &complex)
    }

    /// Builds a matrix from nested real rows. Panics on ragged input; meant for
    /// literals in tests and examples.
    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.as_ref().len());
        let flat: Vec<f64> = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.as_ref().len(), n, "ragged rows");
                r.as_ref().iter().copied()
            })
            .collect();
        Self::from_real_row_slice(m, n, &flat).expect("finite literal")
    }

    pub fn from_rows<R: AsRef<[Scalar]>>(rows: &[R]) -> Self {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.as_ref().len());
        let flat: Vec<Scalar> = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.as_ref().len(), n, "ragged rows");
                r.as_ref().iter().copied()
            })
            .collect();
        Self::from_row_slice(m, n, &flat).expect("finite literal")
    }

    pub fn diag(entries: &[Scalar]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i] } else { ZERO })
    }

    pub fn diag_real(entries: &[f64]) -> Self {
        let n = entries.len();
        Self::from_fn(
            n,
            n,
            |i, j| if i == j { c64(entries[i], 0.0) } else { ZERO },
        )
    }

    /// Column matrix.
    pub fn column(entries: &[Scalar]) -> Self {
        Self(DMatrix::from_column_slice(entries.len(), 1, entries))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows())
        } else {
            Err(Error::NotSquare {
                rows: self.rows(),
                cols: self.cols(),
            })
        }
    }

    pub fn get(&self, row: usize, col: usize) -> Scalar {
        self.0[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Scalar) {
        self.0[(row, col)] = value;
    }

    pub fn as_inner(&self) -> &DMatrix<Scalar> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Scalar> {
        self.0
    }

    /// Entries in row-major order.
    pub fn row_major(&self) -> Vec<Scalar> {
        let (m, n) = self.shape();
        let mut out = Vec::with_capacity(m * n);
        for i in 0..m {
            for j in 0..n {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn scale(&self, alpha: Scalar) -> Self {
        Self(&self.0 * alpha)
    }

    pub fn scale_real(&self, alpha: f64) -> Self {
        self.scale(c64(alpha, 0.0))
    }

    pub fn column_vector(&self, j: usize) -> Vec<Scalar> {
        self.0.column(j).iter().copied().collect()
    }

    /// First `k` columns.
    pub fn leading_columns(&self, k: usize) -> Self {
        Self(self.0.columns(0, k).into_owned())
    }

    /// Columns `start..cols()`.
    pub fn trailing_columns(&self, start: usize) -> Self {
        Self(self.0.columns(start, self.cols() - start).into_owned())
    }

    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows() != other.rows() {
            return Err(shape_mismatch("hstack", self.shape(), other.shape()));
        }
        let (m, n1, n2) = (self.rows(), self.cols(), other.cols());
        Ok(Self::from_fn(m, n1 + n2, |i, j| {
            if j < n1 {
                self.0[(i, j)]
            } else {
                other.0[(i, j - n1)]
            }
        }))
    }

    pub fn apply(&self, x: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(
            x.len(),
            self.cols(),
            "vector length must match column count"
        );
        let v = DVector::from_column_slice(x);
        (&self.0 * v).iter().copied().collect()
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols() != rhs.rows() {
            return Err(shape_mismatch("product", self.shape(), rhs.shape()));
        }
        Ok(Self(&self.0 * &rhs.0))
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(shape_mismatch("sum", self.shape(), rhs.shape()));
        }
        Ok(Self(&self.0 + &rhs.0))
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(shape_mismatch("difference", self.shape(), rhs.shape()));
        }
        Ok(Self(&self.0 - &rhs.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }

    /// Hermitian part `(A + A*) / 2`; used before handing a matrix that is
    /// Hermitian up to rounding to the eigensolver.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * c64(0.5, 0.0))
    }

    /// True when every off-diagonal entry is exactly zero.
    pub fn is_diagonal(&self) -> bool {
        let (m, n) = self.shape();
        (0..m).all(|i| (0..n).all(|j| i == j || self.0[(i, j)] == ZERO))
    }

    pub fn is_finite(&self) -> bool {
        check_finite(&self.0).is_ok()
    }
}

fn check_finite(m: &DMatrix<Scalar>) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

pub(crate) fn vec_norm(x: &[Scalar]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn inner(x: &[Scalar], y: &[Scalar]) -> Scalar {
    // <x, y> linear in the first argument
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DenseMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "\n  ")?;
            for j in 0..self.cols() {
                let z = self.0[(i, j)];
                write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
            }
        }
        write!(f, "\n]")
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&DenseMatrix> for &DenseMatrix {
            type Output = DenseMatrix;
            fn $method(self, rhs: &DenseMatrix) -> DenseMatrix {
                self.$checked(rhs)
                    .expect("shape mismatch in matrix arithmetic")
            }
        }
        impl $trait<DenseMatrix> for DenseMatrix {
            type Output = DenseMatrix;
            fn $method(self, rhs: DenseMatrix) -> DenseMatrix {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&DenseMatrix> for DenseMatrix {
            type Output = DenseMatrix;
            fn $method(self, rhs: &DenseMatrix) -> DenseMatrix {
                (&self).$method(rhs)
            }
        }
        impl $trait<DenseMatrix> for &DenseMatrix {
            type Output = DenseMatrix;
            fn $method(self, rhs: DenseMatrix) -> DenseMatrix {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Mul, mul, try_mul);
binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);

impl Neg for &DenseMatrix {
    type Output = DenseMatrix;
    fn neg(self) -> DenseMatrix {
        DenseMatrix(-&self.0)
    }
}

/// Wire form shared with the JSON matrix format: row-major parallel
/// real/imaginary arrays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Option<Vec<f64>>,
}

impl DenseJson {
    pub fn from_matrix(a: &DenseMatrix) -> Self {
        let entries = a.row_major();
        Self {
            rows: a.rows(),
            cols: a.cols(),
            re: entries.iter().map(|z| z.re).collect(),
            im: Some(entries.iter().map(|z| z.im).collect()),
        }
    }

    pub fn into_matrix(self) -> Result<DenseMatrix> {
        let count = self.rows * self.cols;
        if self.re.len() != count {
            return Err(Error::Parse(format!(
                "expected {count} real parts, got {}",
                self.re.len()
            )));
        }
        let im = self.im.unwrap_or_else(|| vec![0.0; count]);
        if im.len() != count {
            return Err(Error::Parse(format!(
                "expected {count} imaginary parts, got {}",
                im.len()
            )));
        }
        let entries: Vec<Scalar> = self.re.iter().zip(&im).map(|(&r, &i)| c64(r, i)).collect();
        DenseMatrix::from_row_slice(self.rows, self.cols, &entries)
    }
}

impl Serialize for DenseMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        DenseJson::from_matrix(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DenseMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        DenseJson::deserialize(deserializer)?
            .into_matrix()
            .map_err(serde::de::Error::custom)
    }
}
