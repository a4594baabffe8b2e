//! Ready-made problem drivers: matrix completion, constrained low-rank
//! approximation and Hankel low-rank approximation. Each one runs the
//! splitting solver on the convex relaxation and certifies the result.

use std::time::{Duration, Instant};

use crate::certificate::{certify, ApproximationObjective, Certificate, CompletionObjective};
use crate::dr::{dr_solve, DrConfig, DrTrace, Termination};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::norms::Rank;
use crate::operator::{
    compose_linear_shift, EntryConstraint, HankelConstraint, NormProx, SampleConstraint,
};
use crate::projections::{
    hankel_from_sequence, hankel_structure_residual, proj_hankel, proj_samples,
    sequence_from_hankel, HankelShape, SampleSet,
};
use crate::prox::{proj_rank, ProxKind};

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub solution: Matrix,
    pub trace: DrTrace,
    pub certificate: Certificate,
    pub config: DrConfig,
    pub elapsed: Duration,
}

impl RunOutcome {
    pub fn termination(&self) -> Termination {
        self.trace.termination
    }
}

/// `min ‖X‖_{r*}` subject to `X` matching the samples.
pub fn complete(samples: &SampleSet, r: Rank, cfg: &DrConfig, rank_tol: f64) -> Result<RunOutcome> {
    let start = Instant::now();
    let (rows, cols) = samples.shape();
    r.check(rows.min(cols))?;
    let f = NormProx::new(ProxKind::Norm, r);
    let g = SampleConstraint(samples.clone());
    let z0 = proj_samples(&Matrix::zeros(rows, cols), samples)?;
    let sol = dr_solve(&f, &g, &z0, cfg)?;
    let objective = CompletionObjective { rank: r };
    let certificate = certify(&objective, &sol.x, r, rank_tol, &|m| proj_samples(m, samples))?;
    Ok(RunOutcome {
        solution: sol.x,
        trace: sol.trace,
        certificate,
        config: *cfg,
        elapsed: start.elapsed(),
    })
}

/// `min ½‖X‖²_{r*} − ⟨N, X⟩` over the entry constraint, the convex
/// relaxation of `min ½‖N − X‖²_F` subject to `rank X ≤ r` and the constraint.
pub fn approximate(
    n: &Matrix,
    r: Rank,
    constraint: EntryConstraint,
    cfg: &DrConfig,
    rank_tol: f64,
) -> Result<RunOutcome> {
    let start = Instant::now();
    let f = compose_linear_shift(ProxKind::Squared, n.clone(), r)?;
    let sol = dr_solve(&f, &constraint, n, cfg)?;
    let objective = ApproximationObjective { target: n.clone(), rank: r };
    let certificate = certify(&objective, &sol.x, r, rank_tol, &|m| constraint.project(m))?;
    Ok(RunOutcome {
        solution: sol.x,
        trace: sol.trace,
        certificate,
        config: *cfg,
        elapsed: start.elapsed(),
    })
}

#[derive(Debug, Clone)]
pub struct HankelOutcome {
    pub run: RunOutcome,
    /// Hankel matrix built from the input sequence.
    pub target: Matrix,
    /// Defining sequence of the approximation.
    pub sequence: Vec<f64>,
    /// `‖H − X‖_F`.
    pub error: f64,
    /// Truncate-then-project heuristic `proj_hankel(proj_rank(H, r))`.
    pub heuristic: Matrix,
    pub heuristic_error: f64,
    /// Largest anti-diagonal variance of the approximation.
    pub structure_residual: f64,
}

/// Low-rank Hankel approximation of the Hankel matrix of `h`.
pub fn hankel_reduce(
    h: &[f64],
    shape: HankelShape,
    r: Rank,
    cfg: &DrConfig,
    rank_tol: f64,
) -> Result<HankelOutcome> {
    let start = Instant::now();
    if h.len() != shape.sequence_len() {
        return Err(Error::Shape(format!(
            "sequence has {} values, a {}x{} Hankel matrix needs {}",
            h.len(),
            shape.rows,
            shape.cols,
            shape.sequence_len()
        )));
    }
    let target = hankel_from_sequence(h, shape)?;
    let f = compose_linear_shift(ProxKind::Squared, target.clone(), r)?;
    let sol = dr_solve(&f, &HankelConstraint, &target, cfg)?;
    let objective = ApproximationObjective { target: target.clone(), rank: r };
    let certificate = certify(&objective, &sol.x, r, rank_tol, &|m| Ok(proj_hankel(m)))?;

    let heuristic = proj_hankel(&proj_rank(&target, r)?);
    let heuristic_error = target.distance(&heuristic)?;
    let error = target.distance(&sol.x)?;
    let structure_residual = hankel_structure_residual(&sol.x);
    let sequence = sequence_from_hankel(&sol.x);
    Ok(HankelOutcome {
        run: RunOutcome {
            solution: sol.x,
            trace: sol.trace,
            certificate,
            config: *cfg,
            elapsed: start.elapsed(),
        },
        target,
        sequence,
        error,
        heuristic,
        heuristic_error,
        structure_residual,
    })
}
