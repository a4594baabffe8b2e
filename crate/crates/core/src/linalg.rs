//! Dense real matrices and the thin singular value decomposition.
//!
//! Every norm and proximal operator in this crate is unitarily invariant, so
//! the only factorization needed is the thin SVD `A = U diag(s) Vᵀ` with
//! `p = min(rows, cols)` singular triplets. Column signs of `U` and `V` are
//! whatever the backend returns; downstream code only looks at singular
//! values or at reconstructed matrices.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Dense row-major real matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape(format!("{rows}x{cols} matrix has no entries")));
        }
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries given for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from a list of equally long rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Error::Shape(format!(
                "row {i} has {} entries, expected {cols}",
                row.len()
            )));
        }
        Matrix::new(rows.len(), cols, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    /// Square diagonal matrix.
    pub fn from_diag(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        Matrix::new(
            n,
            n,
            (0..n * n).map(|k| if k / n == k % n { diag[k / n] } else { 0.0 }).collect(),
        )
    }

    /// Builds a matrix entry by entry. Panics if `f` produces a non-finite value.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix::new(rows, cols, data).expect("from_fn produced an invalid matrix")
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Smallest dimension, the length of the thin singular-value vector.
    #[inline]
    pub fn min_dim(&self) -> usize {
        self.rows.min(self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    /// Row-major entries.
    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Applies `f` to every entry. The caller is responsible for keeping the
    /// result finite; this is checked with a panic.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let data: Vec<f64> = self.data.iter().map(|&v| f(v)).collect();
        assert!(data.iter().all(|v| v.is_finite()), "map produced a non-finite entry");
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    /// Same matrix with one entry replaced.
    pub fn with_entry(&self, i: usize, j: usize, value: f64) -> Matrix {
        assert!(value.is_finite());
        let mut out = self.clone();
        out.data[i * self.cols + j] = value;
        out
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn ensure_same_shape(&self, other: &Matrix) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// Frobenius inner product `trace(selfᵀ other)`.
    pub fn inner(&self, other: &Matrix) -> Result<f64> {
        self.ensure_same_shape(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    /// `‖self − other‖_F`.
    pub fn distance(&self, other: &Matrix) -> Result<f64> {
        self.ensure_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt())
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: f64, other: &Matrix) -> Result<Matrix> {
        self.ensure_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + alpha * b).collect();
        Matrix::new(self.rows, self.cols, data)
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix::from_nalgebra(&(self.to_nalgebra() * other.to_nalgebra())))
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<f64>) -> Matrix {
        Matrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl Add for &Matrix {
    type Output = Matrix;

    /// Panics on shape mismatch.
    fn add(self, rhs: &Matrix) -> Matrix {
        self.axpy(1.0, rhs).expect("matrix addition")
    }
}

impl Sub for &Matrix {
    type Output = Matrix;

    /// Panics on shape mismatch.
    fn sub(self, rhs: &Matrix) -> Matrix {
        self.axpy(-1.0, rhs).expect("matrix subtraction")
    }
}

impl Mul<f64> for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: f64) -> Matrix {
        self.map(|v| v * rhs)
    }
}

impl Neg for &Matrix {
    type Output = Matrix;

    fn neg(self) -> Matrix {
        self.map(|v| -v)
    }
}

/// Nonnegative values sorted in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralVector(Vec<f64>);

impl SpectralVector {
    /// Validates that `values` is finite, nonnegative and sorted descending.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSpectrum("empty vector".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidSpectrum(format!("entry {v} is negative or not finite")));
        }
        if let Some(i) = values.windows(2).position(|w| w[0] < w[1]) {
            return Err(Error::InvalidSpectrum(format!(
                "not sorted descending at position {i}: {} < {}",
                values[i],
                values[i + 1]
            )));
        }
        Ok(SpectralVector(values))
    }

    /// Sorts a nonnegative vector descending before validating it.
    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidSpectrum("NaN entry".into()));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        SpectralVector::new(values)
    }

    /// Wraps the output of a kernel whose exact result is sorted and
    /// nonnegative, removing rounding-level violations of either property.
    pub(crate) fn from_kernel(mut values: Vec<f64>) -> Self {
        let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        debug_assert!(
            values.iter().all(|v| v.is_finite() && *v >= -1e-9 * scale),
            "kernel produced a negative entry: {values:?}"
        );
        debug_assert!(
            values.windows(2).all(|w| w[0] >= w[1] - 1e-9 * scale),
            "kernel broke the descending order: {values:?}"
        );
        let mut prev = f64::INFINITY;
        for v in &mut values {
            *v = v.max(0.0).min(prev);
            prev = *v;
        }
        SpectralVector(values)
    }

    pub fn zeros(len: usize) -> Self {
        SpectralVector(vec![0.0; len])
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Multiplies every entry by a nonnegative factor.
    pub fn scaled(&self, factor: f64) -> SpectralVector {
        assert!(factor >= 0.0 && factor.is_finite());
        SpectralVector(self.0.iter().map(|v| v * factor).collect())
    }
}

/// Thin SVD factors `u (rows×p)`, `s (p)`, `v (cols×p)`.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    u: Matrix,
    s: SpectralVector,
    v: Matrix,
}

impl SvdFactors {
    /// Assembles factors, checking only that the shapes agree.
    pub fn new(u: Matrix, s: SpectralVector, v: Matrix) -> Result<Self> {
        let p = s.len();
        if u.cols() != p || v.cols() != p {
            return Err(Error::Shape(format!(
                "factors u {}x{}, v {}x{} do not match {p} singular values",
                u.rows(),
                u.cols(),
                v.rows(),
                v.cols()
            )));
        }
        Ok(SvdFactors { u, s, v })
    }

    pub fn u(&self) -> &Matrix {
        &self.u
    }

    pub fn s(&self) -> &SpectralVector {
        &self.s
    }

    pub fn v(&self) -> &Matrix {
        &self.v
    }

    /// Shape of the factored matrix.
    pub fn shape(&self) -> (usize, usize) {
        (self.u.rows(), self.v.rows())
    }
}

/// Thin singular value decomposition with singular values sorted descending.
pub fn svd(a: &Matrix) -> Result<SvdFactors> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let (m, n) = a.shape();
    let p = m.min(n);
    let decomposition = nalgebra::SVD::try_new_unordered(
        a.to_nalgebra(),
        true,
        true,
        f64::EPSILON * 5.0,
        100_000,
    )
    .ok_or(Error::SvdFailed)?;
    let (Some(u), Some(v_t)) = (decomposition.u, decomposition.v_t) else {
        return Err(Error::SvdFailed);
    };
    let values = decomposition.singular_values;

    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));

    let s: Vec<f64> = order.iter().map(|&k| values[k].max(0.0)).collect();
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::SvdFailed);
    }
    let u = Matrix::from_fn(m, p, |i, k| u[(i, order[k])]);
    let v = Matrix::from_fn(n, p, |j, k| v_t[(order[k], j)]);
    Ok(SvdFactors { u, s: SpectralVector(s), v })
}

/// Singular values of `a`, sorted descending.
pub fn singular_values(a: &Matrix) -> Result<SpectralVector> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let values = nalgebra::SVD::try_new_unordered(
        a.to_nalgebra(),
        false,
        false,
        f64::EPSILON * 5.0,
        100_000,
    )
    .ok_or(Error::SvdFailed)?
    .singular_values;
    SpectralVector::from_unsorted(values.iter().map(|v| v.max(0.0)).collect())
        .map_err(|_| Error::SvdFailed)
}

/// `u · diag(s) · vᵀ`.
pub fn reconstruct(f: &SvdFactors) -> Result<Matrix> {
    lift(&f.u, f.s.as_slice(), &f.v)
}

/// Replaces the singular values of a factorization: `u · diag(new_s) · vᵀ`.
pub fn apply_spectral(f: &SvdFactors, new_s: &SpectralVector) -> Result<Matrix> {
    if new_s.len() != f.s.len() {
        return Err(Error::Shape(format!(
            "{} new singular values for a factorization with {}",
            new_s.len(),
            f.s.len()
        )));
    }
    // SpectralVector construction already enforces order and sign.
    lift(&f.u, new_s.as_slice(), &f.v)
}

fn lift(u: &Matrix, s: &[f64], v: &Matrix) -> Result<Matrix> {
    let p = s.len();
    if u.cols() != p || v.cols() != p {
        return Err(Error::Shape("factor shapes are inconsistent".into()));
    }
    let (m, n) = (u.rows(), v.rows());
    let mut data = vec![0.0; m * n];
    for (k, &sk) in s.iter().enumerate() {
        if sk == 0.0 {
            continue;
        }
        for i in 0..m {
            let a = sk * u.get(i, k);
            if a == 0.0 {
                continue;
            }
            let row = &mut data[i * n..(i + 1) * n];
            for (j, out) in row.iter_mut().enumerate() {
                *out += a * v.get(j, k);
            }
        }
    }
    Matrix::new(m, n, data)
}
