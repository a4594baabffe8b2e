//! Euclidean projections onto the convex constraint sets used by the
//! applications: Hankel structure, observed entries, nonnegativity and boxes.

use std::collections::HashSet;

use crate::error::{invalid, Error, Result};
use crate::linalg::Matrix;

/// Observed entries `(i, j, value)` of a `rows × cols` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SampleSet {
    /// Rejects out-of-range or repeated indices and non-finite values.
    pub fn new(rows: usize, cols: usize, entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape(format!("{rows}x{cols} sample shape has no entries")));
        }
        let mut seen = HashSet::with_capacity(entries.len());
        for &(i, j, v) in &entries {
            if i >= rows || j >= cols {
                return Err(Error::Shape(format!("sample ({i},{j}) outside a {rows}x{cols} matrix")));
            }
            if !v.is_finite() {
                return Err(Error::NonFinite);
            }
            if !seen.insert((i, j)) {
                return Err(invalid(format!("entry ({i},{j}) is sampled more than once")));
            }
        }
        Ok(SampleSet { rows, cols, entries })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Overwrites the observed entries of `z` with their sampled values.
pub fn proj_samples(z: &Matrix, s: &SampleSet) -> Result<Matrix> {
    if z.shape() != s.shape() {
        return Err(Error::Shape(format!(
            "matrix is {}x{} but samples describe {}x{}",
            z.rows(),
            z.cols(),
            s.rows,
            s.cols
        )));
    }
    let mut data = z.as_slice().to_vec();
    for &(i, j, v) in &s.entries {
        data[i * s.cols + j] = v;
    }
    Matrix::new(s.rows, s.cols, data)
}

/// Dimensions of a Hankel matrix; it is defined by `rows + cols − 1` values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HankelShape {
    pub rows: usize,
    pub cols: usize,
}

impl HankelShape {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape("Hankel dimensions must be at least 1".into()));
        }
        Ok(HankelShape { rows, cols })
    }

    pub fn sequence_len(&self) -> usize {
        self.rows + self.cols - 1
    }
}

/// Hankel matrix `H[i][j] = h[i + j]`.
pub fn hankel_from_sequence(h: &[f64], shape: HankelShape) -> Result<Matrix> {
    if h.len() != shape.sequence_len() {
        return Err(Error::Shape(format!(
            "a {}x{} Hankel matrix needs {} values, got {}",
            shape.rows,
            shape.cols,
            shape.sequence_len(),
            h.len()
        )));
    }
    if h.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(Matrix::from_fn(shape.rows, shape.cols, |i, j| h[i + j]))
}

/// Mean of each anti-diagonal, indexed by `i + j`. Accumulated as offsets
/// from the anti-diagonal's first entry, so constant anti-diagonals return
/// their value exactly.
pub fn antidiagonal_means(z: &Matrix) -> Vec<f64> {
    let (m, n) = z.shape();
    let first: Vec<f64> = (0..m + n - 1)
        .map(|k| if k < n { z.get(0, k) } else { z.get(k - n + 1, n - 1) })
        .collect();
    let mut offsets = vec![0.0; m + n - 1];
    let mut counts = vec![0usize; m + n - 1];
    for i in 0..m {
        for (j, v) in z.row(i).iter().enumerate() {
            offsets[i + j] += v - first[i + j];
            counts[i + j] += 1;
        }
    }
    first
        .iter()
        .zip(offsets.iter().zip(&counts))
        .map(|(f, (o, &c))| f + o / c as f64)
        .collect()
}

/// Defining sequence of a (near-)Hankel matrix, read off as anti-diagonal means.
pub fn sequence_from_hankel(z: &Matrix) -> Vec<f64> {
    antidiagonal_means(z)
}

/// Orthogonal projection onto Hankel matrices: replace every anti-diagonal
/// by its arithmetic mean.
pub fn proj_hankel(z: &Matrix) -> Matrix {
    let means = antidiagonal_means(z);
    Matrix::from_fn(z.rows(), z.cols(), |i, j| means[i + j])
}

/// Largest anti-diagonal variance; zero exactly for Hankel matrices.
pub fn hankel_structure_residual(z: &Matrix) -> f64 {
    let means = antidiagonal_means(z);
    let (m, n) = z.shape();
    let mut sq = vec![0.0; m + n - 1];
    let mut counts = vec![0usize; m + n - 1];
    for i in 0..m {
        for (j, v) in z.row(i).iter().enumerate() {
            let d = v - means[i + j];
            sq[i + j] += d * d;
            counts[i + j] += 1;
        }
    }
    sq.iter().zip(&counts).map(|(s, &c)| s / c as f64).fold(0.0, f64::max)
}

pub fn proj_nonneg(z: &Matrix) -> Matrix {
    z.map(|v| v.max(0.0))
}

pub fn proj_box(z: &Matrix, lo: f64, hi: f64) -> Result<Matrix> {
    check_box(lo, hi)?;
    Ok(z.map(|v| v.clamp(lo, hi)))
}

pub(crate) fn check_box(lo: f64, hi: f64) -> Result<()> {
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(invalid(format!("box bounds [{lo}, {hi}] are empty")));
    }
    Ok(())
}
