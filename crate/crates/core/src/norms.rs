//! The truncated Frobenius norm and its dual, the low-rank inducing
//! Frobenius norm.
//!
//! For a rank parameter `r`, the truncated norm of `X` is the Euclidean norm
//! of its `r` largest singular values. Its dual norm, written `‖·‖_{r*}`
//! here, is the k-support norm (with `k = r`) of the singular-value vector.
//! `‖X‖_{r*} = ‖X‖_F` whenever `rank(X) ≤ r`, and `‖X‖_{r*} ≥ ‖X‖_F`
//! otherwise.

use std::num::NonZeroUsize;

use crate::error::{Error, Result};
use crate::linalg::{singular_values, Matrix, SpectralVector};

/// Target rank `r ≥ 1`. Upper bounds are checked where the rank is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rank(NonZeroUsize);

impl Rank {
    pub fn new(r: usize) -> Result<Self> {
        NonZeroUsize::new(r)
            .map(Rank)
            .ok_or(Error::RankOutOfRange { rank: r, max: usize::MAX })
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0.get()
    }

    /// Errors unless `r ≤ max`.
    pub fn check(self, max: usize) -> Result<usize> {
        let r = self.get();
        if r > max {
            return Err(Error::RankOutOfRange { rank: r, max });
        }
        Ok(r)
    }
}

impl TryFrom<usize> for Rank {
    type Error = Error;

    fn try_from(r: usize) -> Result<Self> {
        Rank::new(r)
    }
}

/// Euclidean norm of the `r` largest entries of a sorted spectrum.
pub fn truncated_norm_vec(z: &SpectralVector, r: Rank) -> Result<f64> {
    let r = r.check(z.len())?;
    Ok(z.as_slice()[..r].iter().map(|v| v * v).sum::<f64>().sqrt())
}

/// `sqrt(σ₁² + … + σ_r²)`.
pub fn truncated_fro_norm(x: &Matrix, r: Rank) -> Result<f64> {
    r.check(x.min_dim())?;
    truncated_norm_vec(&singular_values(x)?, r)
}

/// k-support norm of a sorted nonnegative vector, with `k = r`.
///
/// With 1-based indices and `z_0 = +∞`, find the `t ∈ {0, …, r−1}` with
/// `z_{r−t−1} > T_t/(t+1) ≥ z_{r−t}` where `T_t = Σ_{i ≥ r−t} z_i`; then
/// `‖z‖² = Σ_{i < r−t} z_i² + T_t²/(t+1)`.
pub fn ksup_norm_vec(z: &SpectralVector, r: Rank) -> Result<f64> {
    let r = r.check(z.len())?;
    let z = z.as_slice();
    let t = ksup_split(z, r);
    // Head covers 0-based indices 0..r-t-1, tail r-t-1..d.
    let head_len = r - t - 1;
    let head: f64 = z[..head_len].iter().map(|v| v * v).sum();
    let tail: f64 = z[head_len..].iter().sum();
    Ok((head + tail * tail / (t + 1) as f64).sqrt())
}

/// Index `t` of the k-support formula. The first `t` satisfying the weak
/// form `z_{r−t−1} ≥ avg ≥ z_{r−t}` is accepted; the norm is continuous
/// across ties. If rounding leaves no admissible `t`, the least violating
/// one is used.
fn ksup_split(z: &[f64], r: usize) -> usize {
    let mut tail: f64 = z[r - 1..].iter().sum();
    let mut best = (f64::INFINITY, 0);
    for t in 0..r {
        // 0-based: the tail starts at r-t-1, the entry above it at r-t-2.
        let avg = tail / (t + 1) as f64;
        let below = z[r - t - 1];
        let above = if r >= t + 2 { z[r - t - 2] } else { f64::INFINITY };
        let violation = (below - avg).max(0.0) + (avg - above).max(0.0);
        if violation == 0.0 {
            return t;
        }
        if violation < best.0 {
            best = (violation, t);
        }
        if r >= t + 2 {
            tail += z[r - t - 2];
        }
    }
    best.1
}

/// `‖X‖_{r*}`, the dual of [`truncated_fro_norm`].
pub fn low_rank_inducing_fro_norm(x: &Matrix, r: Rank) -> Result<f64> {
    r.check(x.min_dim())?;
    ksup_norm_vec(&singular_values(x)?, r)
}

pub fn frobenius_norm(x: &Matrix) -> f64 {
    x.frobenius_norm()
}
