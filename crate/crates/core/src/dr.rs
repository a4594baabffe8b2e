//! Relaxed Douglas–Rachford splitting for `min f(X) + g(X)`.
//!
//! ```text
//! x_k     = prox_{γg}(z_k)
//! y_k     = prox_{γf}(2x_k − z_k)
//! z_{k+1} = z_k + λ(y_k − x_k)
//! ```
//!
//! The iteration stops on the fixed-point residual `‖y_k − x_k‖_F`, which
//! costs nothing extra; objective values are only computed when logging is
//! requested.

use std::fmt;
use std::io::{self, Write};

use crate::error::{invalid, Error, Result};
use crate::linalg::Matrix;
use crate::operator::{ensure_shape, ProxOperator};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrConfig {
    /// Step size `γ > 0`.
    pub gamma: f64,
    /// Relaxation `λ ∈ (0, 2)`.
    pub lambda: f64,
    /// Fixed-point residual tolerance.
    pub tol: f64,
    pub max_iter: usize,
    /// Record `f + g` every `log_every` iterations; 0 disables it.
    pub log_every: usize,
}

impl Default for DrConfig {
    fn default() -> Self {
        DrConfig { gamma: 1.0, lambda: 1.0, tol: 1e-8, max_iter: 10_000, log_every: 0 }
    }
}

impl DrConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(invalid(format!("gamma must be positive, got {}", self.gamma)));
        }
        if !(self.lambda > 0.0 && self.lambda < 2.0) {
            return Err(invalid(format!("lambda must lie in (0, 2), got {}", self.lambda)));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(invalid(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(invalid("max_iter must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIter,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::Converged => "converged",
            Termination::MaxIter => "max_iter",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterRecord {
    pub iter: usize,
    pub residual: f64,
    pub objective: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DrTrace {
    pub records: Vec<IterRecord>,
    pub termination: Termination,
}

impl DrTrace {
    /// Number of iterations performed.
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn final_residual(&self) -> f64 {
        self.records.last().map_or(f64::INFINITY, |r| r.residual)
    }

    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }

    /// Writes `iter<TAB>residual<TAB>objective` for every iteration that
    /// logged an objective value.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        for r in self.records.iter().filter(|r| r.objective.is_some()) {
            writeln!(out, "{}\t{:.17e}\t{:.17e}", r.iter, r.residual, r.objective.unwrap())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct DrSolution {
    pub x: Matrix,
    pub trace: DrTrace,
}

fn tag(err: Error, iteration: usize, stage: &'static str) -> Error {
    match err {
        Error::NonFinite => Error::NonFiniteIterate { iteration, stage },
        other => other,
    }
}

/// Runs relaxed Douglas–Rachford from `z0`. Returns the `g`-side iterate
/// `x_K`, so the solution always lies in the domain of `g`.
pub fn dr_solve(
    prox_f: &dyn ProxOperator,
    prox_g: &dyn ProxOperator,
    z0: &Matrix,
    cfg: &DrConfig,
) -> Result<DrSolution> {
    cfg.validate()?;
    if !z0.is_finite() {
        return Err(Error::NonFinite);
    }
    let shape = z0.shape();
    let mut z = z0.clone();
    let mut records = Vec::with_capacity(cfg.max_iter.min(4096));
    for k in 0..cfg.max_iter {
        let x = prox_g.prox(&z, cfg.gamma).map_err(|e| tag(e, k, "prox_g"))?;
        ensure_shape(&x, shape)?;
        let reflected = (&x * 2.0).axpy(-1.0, &z).map_err(|e| tag(e, k, "reflection"))?;
        let y = prox_f.prox(&reflected, cfg.gamma).map_err(|e| tag(e, k, "prox_f"))?;
        ensure_shape(&y, shape)?;

        let residual = y.distance(&x)?;
        if !residual.is_finite() {
            return Err(Error::NonFiniteIterate { iteration: k, stage: "residual" });
        }
        let converged = residual <= cfg.tol;
        let last = converged || k + 1 == cfg.max_iter;
        let objective = if cfg.log_every > 0 && (k % cfg.log_every == 0 || last) {
            match (prox_f.value(&x), prox_g.value(&x)) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            }
        } else {
            None
        };
        records.push(IterRecord { iter: k, residual, objective });
        if converged {
            return Ok(DrSolution {
                x,
                trace: DrTrace { records, termination: Termination::Converged },
            });
        }
        if last {
            return Ok(DrSolution { x, trace: DrTrace { records, termination: Termination::MaxIter } });
        }
        z = z.axpy(cfg.lambda, &(&y - &x)).map_err(|e| tag(e, k, "update"))?;
    }
    unreachable!("max_iter is at least 1")
}
