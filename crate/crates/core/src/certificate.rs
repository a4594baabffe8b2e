//! A-posteriori checks on a convex-relaxation solution.
//!
//! If the relaxed solution has rank at most `r`, it solves the original
//! rank-constrained problem (the relaxation is tight). Otherwise the
//! optimum is bracketed between the relaxed objective and the objective of
//! a feasible candidate obtained by alternating projections.

use crate::error::{invalid, Result};
use crate::linalg::{singular_values, Matrix};
use crate::norms::{low_rank_inducing_fro_norm, Rank};
use crate::prox::proj_rank;

pub const DEFAULT_RANK_TOL: f64 = 1e-6;

const ALTERNATION_CAP: usize = 100;
const ALTERNATION_TOL: f64 = 1e-9;
const FEASIBILITY_TOL: f64 = 1e-6;

/// Outcome of the a-posteriori checks.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub numerical_rank: usize,
    pub rank_tol: f64,
    pub tight: bool,
    pub lower_bound: f64,
    /// `+∞` when no feasible candidate was found.
    pub upper_bound: f64,
    pub feasible_candidate: Option<Matrix>,
}

impl Certificate {
    pub fn gap(&self) -> f64 {
        self.upper_bound - self.lower_bound
    }
}

/// Number of singular values above `tol · σ_max`; 0 for the zero matrix.
pub fn numerical_rank(x: &Matrix, tol: f64) -> Result<usize> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(invalid(format!("rank tolerance must be positive, got {tol}")));
    }
    let s = singular_values(x)?;
    let top = s.as_slice()[0];
    if top == 0.0 {
        return Ok(0);
    }
    Ok(s.as_slice().iter().filter(|&&v| v > tol * top).count())
}

/// True iff the relaxed solution is (numerically) of rank at most `r`.
pub fn tightness_check(x_star: &Matrix, r: Rank, rank_tol: f64) -> Result<bool> {
    Ok(numerical_rank(x_star, rank_tol)? <= r.get())
}

/// The nonconvex objective and its convex relaxation.
pub trait ObjectivePair {
    /// Original objective, `+∞` where the rank constraint is violated.
    fn original(&self, x: &Matrix) -> Result<f64>;
    /// Relaxed objective; agrees with `original` on matrices of rank ≤ r.
    fn relaxed(&self, x: &Matrix) -> Result<f64>;
}

fn rank_feasible(x: &Matrix, r: Rank) -> Result<bool> {
    Ok(numerical_rank(x, 1e-9)? <= r.get())
}

/// `½‖N − X‖²_F` against its envelope `½‖X‖²_{r*} − ⟨N,X⟩ + ½‖N‖²_F`.
#[derive(Debug, Clone)]
pub struct ApproximationObjective {
    pub target: Matrix,
    pub rank: Rank,
}

impl ObjectivePair for ApproximationObjective {
    fn original(&self, x: &Matrix) -> Result<f64> {
        if !rank_feasible(x, self.rank)? {
            return Ok(f64::INFINITY);
        }
        let d = self.target.distance(x)?;
        Ok(0.5 * d * d)
    }

    fn relaxed(&self, x: &Matrix) -> Result<f64> {
        let v = low_rank_inducing_fro_norm(x, self.rank)?;
        let n = self.target.frobenius_norm();
        Ok(0.5 * v * v - self.target.inner(x)? + 0.5 * n * n)
    }
}

/// `‖X‖_F` on rank-`r` matrices against `‖X‖_{r*}`.
#[derive(Debug, Clone, Copy)]
pub struct CompletionObjective {
    pub rank: Rank,
}

impl ObjectivePair for CompletionObjective {
    fn original(&self, x: &Matrix) -> Result<f64> {
        if !rank_feasible(x, self.rank)? {
            return Ok(f64::INFINITY);
        }
        Ok(x.frobenius_norm())
    }

    fn relaxed(&self, x: &Matrix) -> Result<f64> {
        low_rank_inducing_fro_norm(x, self.rank)
    }
}

#[derive(Debug, Clone)]
pub struct GapBounds {
    pub lower: f64,
    pub upper: f64,
    /// Last rank-`r` iterate of the alternation.
    pub candidate: Matrix,
    pub feasible: bool,
    pub alternations: usize,
}

/// Lower bound from the relaxed objective at `x_star`; upper bound from
/// alternating `proj_rank` and `constraint_proj` starting at `x_star`.
pub fn gap_bounds(
    problem: &dyn ObjectivePair,
    x_star: &Matrix,
    r: Rank,
    constraint_proj: &dyn Fn(&Matrix) -> Result<Matrix>,
) -> Result<GapBounds> {
    let lower = problem.relaxed(x_star)?;
    let mut current = x_star.clone();
    let mut candidate = x_star.clone();
    let mut alternations = 0;
    for k in 0..ALTERNATION_CAP {
        alternations = k + 1;
        candidate = proj_rank(&current, r)?;
        let projected = constraint_proj(&candidate)?;
        let step = candidate.distance(&projected)?;
        let rank_gap = candidate.distance(&current)?;
        current = projected;
        if step <= ALTERNATION_TOL && rank_gap <= ALTERNATION_TOL {
            break;
        }
    }
    let violation = candidate.distance(&constraint_proj(&candidate)?)?;
    let feasible = violation <= FEASIBILITY_TOL * candidate.frobenius_norm().max(1.0);
    let upper = if feasible { problem.original(&candidate)? } else { f64::INFINITY };
    Ok(GapBounds { lower, upper, candidate, feasible, alternations })
}

/// Numerical rank, tightness and gap bounds in one pass.
pub fn certify(
    problem: &dyn ObjectivePair,
    x_star: &Matrix,
    r: Rank,
    rank_tol: f64,
    constraint_proj: &dyn Fn(&Matrix) -> Result<Matrix>,
) -> Result<Certificate> {
    let numerical_rank = numerical_rank(x_star, rank_tol)?;
    let bounds = gap_bounds(problem, x_star, r, constraint_proj)?;
    Ok(Certificate {
        numerical_rank,
        rank_tol,
        tight: numerical_rank <= r.get(),
        lower_bound: bounds.lower,
        upper_bound: bounds.upper,
        feasible_candidate: bounds.feasible.then_some(bounds.candidate),
    })
}
