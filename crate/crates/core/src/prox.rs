//! Proximal operators of the low-rank inducing Frobenius norm and of its
//! square, plus the nonconvex rank projection.
//!
//! All four vector kernels act on sorted nonnegative spectra. Matrix
//! versions lift them through the SVD, which is valid because every function
//! involved is absolutely symmetric in the singular values.
//!
//! The building block is [`vec_prox_top_r_sq`], the prox of
//! `β/2 · (sum of the r largest squares)`. Everything else is derived from it:
//!
//! * projection onto the truncated-norm ball: bisection on the multiplier;
//! * prox of `γ‖·‖_{r*}`: Moreau decomposition with that projection;
//! * prox of `γ/2 ‖·‖²_{r*}`: Moreau decomposition with the top-r prox, since
//!   the conjugate of `½‖·‖²_{r*}` is `½(truncated norm)²`.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::linalg::{apply_spectral, svd, Matrix, SpectralVector};
use crate::norms::Rank;

/// Step size and rank of a proximal evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProxParams {
    pub gamma: f64,
    pub rank: Rank,
}

impl ProxParams {
    pub fn new(gamma: f64, rank: Rank) -> Result<Self> {
        check_positive("gamma", gamma)?;
        Ok(ProxParams { gamma, rank })
    }
}

/// Which function of the low-rank inducing norm a prox refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProxKind {
    /// `γ‖·‖_{r*}`
    Norm,
    /// `γ/2 · ‖·‖²_{r*}`
    Squared,
}

impl FromStr for ProxKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "norm" => Ok(ProxKind::Norm),
            "squared" | "sq" => Ok(ProxKind::Squared),
            other => Err(invalid(format!("unknown prox kind '{other}' (expected norm or squared)"))),
        }
    }
}

impl fmt::Display for ProxKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProxKind::Norm => "norm",
            ProxKind::Squared => "squared",
        })
    }
}

pub(crate) fn check_positive(name: &str, value: f64) -> Result<()> {
    if !(value.is_finite() && value > 0.0) {
        return Err(invalid(format!("{name} must be positive and finite, got {value}")));
    }
    Ok(())
}

/// Solution structure of the top-r prox: entries `< start` are shrunk by
/// `1+β`, entries `start..=end` share `value`, entries `> end` are untouched.
#[derive(Debug, Clone, Copy, PartialEq)]
struct TieBlock {
    start: usize,
    end: usize,
    value: f64,
}

fn top_r_sq_block(z: &[f64], r: usize, beta: f64) -> Option<TieBlock> {
    let d = z.len();
    let shrink = 1.0 + beta;
    if r == d || z[r - 1] / shrink >= z[r] {
        return None;
    }
    // Grow the block outward from the violated pair (r-1, r) until the
    // bracketing entries satisfy the optimality conditions.
    let (mut p, mut q) = (r - 1, r);
    let mut sum = z[p] + z[q];
    let value = |p: usize, q: usize, sum: f64| sum / ((r - p) as f64 * shrink + (q + 1 - r) as f64);
    let mut v = value(p, q, sum);
    loop {
        let mut grown = false;
        if p > 0 && z[p - 1] / shrink < v {
            p -= 1;
            sum += z[p];
            grown = true;
        }
        if q + 1 < d && z[q + 1] > v {
            q += 1;
            sum += z[q];
            grown = true;
        }
        if !grown {
            break;
        }
        v = value(p, q, sum);
    }
    Some(TieBlock { start: p, end: q, value: v })
}

/// Prox of `β/2 · Σ_{i≤r} x_{[i]}²` at a sorted nonnegative `z`:
///
/// `argmin_x ½‖x − z‖² + β/2 · Σ_{i≤r} x_{[i]}²`.
///
/// The minimizer shrinks the leading entries by `1+β`, leaves the trailing
/// ones alone, and, when that would break the ordering, pools a block
/// around position `r` at a common value.
pub fn vec_prox_top_r_sq(z: &SpectralVector, r: Rank, beta: f64) -> Result<SpectralVector> {
    let r = r.check(z.len())?;
    check_positive("beta", beta)?;
    Ok(top_r_sq(z.as_slice(), r, beta))
}

fn top_r_sq(z: &[f64], r: usize, beta: f64) -> SpectralVector {
    let shrink = 1.0 + beta;
    let mut x: Vec<f64> = z
        .iter()
        .enumerate()
        .map(|(i, &zi)| if i < r { zi / shrink } else { zi })
        .collect();
    if let Some(block) = top_r_sq_block(z, r, beta) {
        x[block.start..=block.end].fill(block.value);
    }
    debug_assert!(top_r_sq_kkt_residual(z, &x, r, beta) <= 1e-9 * (1.0 + z[0]) * (1.0 + beta));
    SpectralVector::from_kernel(x)
}

/// Distance of `z − x` from `β` times the subdifferential of
/// `½ Σ_{i≤r} x_{[i]}²` at a sorted `x`, measured entrywise (max norm).
///
/// Returns 0 exactly at the prox point. Used as a self-check of
/// [`vec_prox_top_r_sq`].
pub fn top_r_sq_kkt_residual(z: &[f64], x: &[f64], r: usize, beta: f64) -> f64 {
    assert_eq!(z.len(), x.len());
    let d = z.len();
    let scale = x.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let tie = 1e-12 * scale;
    let mut residual: f64 = 0.0;
    let mut start = 0;
    while start < d {
        let mut end = start;
        while end + 1 < d && (x[end + 1] - x[start]).abs() <= tie {
            end += 1;
        }
        let g: Vec<f64> = (start..=end).map(|i| (z[i] - x[i]) / beta).collect();
        if end < r {
            // Entirely among the r largest: gradient is x itself.
            for (k, i) in (start..=end).enumerate() {
                residual = residual.max((g[k] - x[i]).abs());
            }
        } else if start >= r {
            // Entirely outside: gradient is zero.
            residual = residual.max(g.iter().fold(0.0, |m, v| m.max(v.abs())));
        } else {
            // Straddling block: g_i = λ_i v with λ ∈ [0,1], Σλ = r − start.
            let v = x[start];
            let budget = (r - start) as f64;
            if v <= tie {
                residual = residual.max(g.iter().fold(0.0, |m, v| m.max(v.abs())));
            } else {
                let mut total = 0.0;
                for gi in &g {
                    let lambda = gi / v;
                    let clipped = lambda.clamp(0.0, 1.0);
                    residual = residual.max((lambda - clipped).abs() * v);
                    total += lambda;
                }
                residual = residual.max((total - budget).abs() * v);
            }
        }
        start = end + 1;
    }
    residual * beta
}

/// Euclidean projection of a sorted nonnegative `z` onto the ball
/// `{x : truncated norm of x (rank r) ≤ radius}`.
///
/// Bisects on the multiplier `μ ≥ 0` of the constraint, using
/// `x(μ) = prox of μ/2 · (top-r squares)`; the constraint value of `x(μ)`
/// is continuous and nonincreasing in `μ`.
pub fn vec_proj_top_r_ball(z: &SpectralVector, r: Rank, radius: f64) -> Result<SpectralVector> {
    let r = r.check(z.len())?;
    check_positive("radius", radius)?;
    Ok(proj_top_r_ball(z, r, radius))
}

fn top_norm(x: &[f64], r: usize) -> f64 {
    x[..r].iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn proj_top_r_ball(z: &SpectralVector, r: usize, radius: f64) -> SpectralVector {
    let zs = z.as_slice();
    if top_norm(zs, r) <= radius {
        return z.clone();
    }
    let at = |mu: f64| top_r_sq(zs, r, mu);
    let mut lo = 0.0;
    let mut hi = z.norm() / radius;
    let mut x_hi = at(hi);
    // The initial bracket can fall short when many equal trailing entries
    // get pooled with the leading ones; widen until feasible.
    while top_norm(x_hi.as_slice(), r) > radius {
        lo = hi;
        hi *= 2.0;
        x_hi = at(hi);
    }
    let tol = 1e-12 * radius;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo < 1e-14 * hi.max(1e-300) {
            break;
        }
        let x = at(mid);
        let value = top_norm(x.as_slice(), r);
        if (value - radius).abs() <= tol {
            return x;
        }
        if value > radius {
            lo = mid;
        } else {
            hi = mid;
            x_hi = x;
        }
    }
    x_hi
}

/// Prox of `γ‖·‖_{r*}` on a sorted spectrum: `z − Π_{γ·ball}(z)`, where the
/// ball is the unit ball of the (dual) truncated norm.
pub fn vec_prox_rstar_norm(z: &SpectralVector, r: Rank, gamma: f64) -> Result<SpectralVector> {
    let r = r.check(z.len())?;
    check_positive("gamma", gamma)?;
    let p = proj_top_r_ball(z, r, gamma);
    Ok(SpectralVector::from_kernel(
        z.as_slice().iter().zip(p.as_slice()).map(|(a, b)| a - b).collect(),
    ))
}

/// Prox of `γ/2 · ‖·‖²_{r*}` on a sorted spectrum, via
/// `z − γ · prox_{(1/γ)·½(top-r squares)}(z/γ)`.
pub fn vec_prox_rstar_sq(z: &SpectralVector, r: Rank, gamma: f64) -> Result<SpectralVector> {
    let r = r.check(z.len())?;
    check_positive("gamma", gamma)?;
    let scaled: Vec<f64> = z.as_slice().iter().map(|v| v / gamma).collect();
    let dual = top_r_sq(&scaled, r, 1.0 / gamma);
    Ok(SpectralVector::from_kernel(
        z.as_slice().iter().zip(dual.as_slice()).map(|(a, b)| a - gamma * b).collect(),
    ))
}

/// Spectral vector kernel matching `kind`.
pub fn vec_prox(kind: ProxKind, z: &SpectralVector, p: ProxParams) -> Result<SpectralVector> {
    match kind {
        ProxKind::Norm => vec_prox_rstar_norm(z, p.rank, p.gamma),
        ProxKind::Squared => vec_prox_rstar_sq(z, p.rank, p.gamma),
    }
}

/// Matrix prox of `γ‖·‖_{r*}` (`Norm`) or `γ/2‖·‖²_{r*}` (`Squared`).
pub fn mat_prox(kind: ProxKind, z: &Matrix, p: ProxParams) -> Result<Matrix> {
    p.rank.check(z.min_dim())?;
    check_positive("gamma", p.gamma)?;
    let f = svd(z)?;
    let s = vec_prox(kind, f.s(), p)?;
    apply_spectral(&f, &s)
}

/// Best rank-`r` approximation in Frobenius norm (truncated SVD). Among
/// equal singular values the first `r` returned by the SVD are kept.
pub fn proj_rank(z: &Matrix, r: Rank) -> Result<Matrix> {
    let r = r.check(z.min_dim())?;
    let f = svd(z)?;
    let mut s = f.s().as_slice().to_vec();
    s[r..].fill(0.0);
    apply_spectral(&f, &SpectralVector::new(s)?)
}
