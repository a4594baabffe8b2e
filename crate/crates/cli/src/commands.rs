use std::fmt;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use lowrank_core::io::{format_matrix, format_sequence, parse_matrix, parse_samples, parse_sequence};
use lowrank_core::problems::RunOutcome;
use lowrank_core::{
    approximate, apply_spectral, hankel_reduce, low_rank_inducing_fro_norm, mat_prox,
    proj_hankel, proj_samples, svd, truncated_fro_norm, vec_proj_top_r_ball, vec_prox_top_r_sq,
    EntryConstraint, Error, HankelShape, Matrix, ProxKind, ProxParams, Rank,
};

use crate::report::RunReport;
use crate::{
    ApproxArgs, CompleteArgs, ConstraintArg, HankelArgs, KindArg, NormsArgs, ProxArgs, SolverArgs,
    EXIT_FAILURE, EXIT_INPUT,
};

/// Moreau residual (relative) above which `prox --check` fails.
const MOREAU_TOL: f64 = 1e-8;
/// Constraint violation (relative) above which `--check` fails.
const FEASIBILITY_TOL: f64 = 1e-9;

/// A `--check` self-test that did not hold.
#[derive(Debug)]
pub struct CheckFailed(String);

impl fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "check failed: {}", self.0)
    }
}

impl std::error::Error for CheckFailed {}

/// Numerical breakdowns and failed checks are not input errors.
pub fn exit_code_for(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<CheckFailed>().is_some() {
        return EXIT_FAILURE;
    }
    match e.downcast_ref::<Error>() {
        Some(Error::NonFiniteIterate { .. } | Error::SvdFailed) => EXIT_FAILURE,
        _ => EXIT_INPUT,
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_matrix(path: &Path) -> Result<Matrix> {
    parse_matrix(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn rank_for(r: usize, rows: usize, cols: usize) -> Result<Rank> {
    let rank = Rank::new(r)?;
    rank.check(rows.min(cols))?;
    Ok(rank)
}

pub fn norms(a: &NormsArgs) -> Result<u8> {
    let m = read_matrix(&a.matrix)?;
    let r = rank_for(a.rank, m.rows(), m.cols())?;
    println!("frobenius={}", m.frobenius_norm());
    println!("truncated={}", truncated_fro_norm(&m, r)?);
    println!("rstar={}", low_rank_inducing_fro_norm(&m, r)?);
    Ok(0)
}

fn kind(k: KindArg) -> ProxKind {
    match k {
        KindArg::Norm => ProxKind::Norm,
        KindArg::Squared => ProxKind::Squared,
    }
}

/// `‖Z − P − γQ‖ / max(1, ‖Z‖)` where `P` is the prox of `γf` at `Z` and `Q`
/// is the prox of `f*/γ` at `Z/γ`, both computed from one SVD of `Z`.
fn moreau_residual(kind: ProxKind, z: &Matrix, x: &Matrix, p: ProxParams) -> Result<f64> {
    let f = svd(z)?;
    let scaled = f.s().scaled(1.0 / p.gamma);
    let dual = match kind {
        // f* is the indicator of the unit ball of the truncated norm.
        ProxKind::Norm => vec_proj_top_r_ball(&scaled, p.rank, 1.0)?,
        // f* is half the squared truncated norm.
        ProxKind::Squared => vec_prox_top_r_sq(&scaled, p.rank, 1.0 / p.gamma)?,
    };
    let q = apply_spectral(&f, &dual)?;
    let gap = (z - x).axpy(-p.gamma, &q)?;
    Ok(gap.frobenius_norm() / z.frobenius_norm().max(1.0))
}

pub fn prox(a: &ProxArgs) -> Result<u8> {
    let z = read_matrix(&a.matrix)?;
    let r = rank_for(a.rank, z.rows(), z.cols())?;
    let p = ProxParams::new(a.gamma, r)?;
    let k = kind(a.kind);
    let x = mat_prox(k, &z, p)?;
    match &a.output {
        Some(path) => write(path, &format_matrix(&x))?,
        None => print!("{}", format_matrix(&x)),
    }
    if a.check {
        let res = moreau_residual(k, &z, &x, p)?;
        eprintln!("moreau_residual={res:e}");
        if res > MOREAU_TOL {
            return Err(CheckFailed(format!("Moreau residual {res:e} exceeds {MOREAU_TOL:e}")).into());
        }
        eprintln!("check=pass");
    }
    Ok(0)
}

/// Writes the solution and trace, runs `--check`, and prints the report.
fn finish(
    s: &SolverArgs,
    problem: String,
    outcome: &RunOutcome,
    constraint_proj: &dyn Fn(&Matrix) -> lowrank_core::Result<Matrix>,
    mut extra: Vec<(&'static str, String)>,
    notes: Vec<String>,
) -> Result<u8> {
    if let Some(path) = &s.output {
        write(path, &format_matrix(&outcome.solution))?;
    }
    if let Some(path) = &s.trace {
        let mut buf = Vec::new();
        outcome.trace.write_tsv(&mut buf)?;
        fs::write(path, buf).with_context(|| format!("writing {}", path.display()))?;
    }
    let x = &outcome.solution;
    let violation = x.distance(&constraint_proj(x)?)? / x.frobenius_norm().max(1.0);
    if s.check {
        extra.push(("feasibility_residual", format!("{violation:e}")));
    }
    let report = RunReport {
        problem,
        outcome,
        solution_path: s.output.clone(),
        trace_path: s.trace.clone(),
        extra,
        notes,
    };
    print!("{report}");
    if s.output.is_none() {
        print!("\n{}", format_matrix(x));
    }
    if s.check && violation > FEASIBILITY_TOL {
        return Err(CheckFailed(format!("constraint violation {violation:e} exceeds {FEASIBILITY_TOL:e}")).into());
    }
    Ok(report.exit_code() as u8)
}

pub fn complete(a: &CompleteArgs) -> Result<u8> {
    let samples = parse_samples(&read(&a.samples)?, a.rows, a.cols)
        .with_context(|| format!("parsing {}", a.samples.display()))?;
    let r = rank_for(a.rank, a.rows, a.cols)?;
    let cfg = a.solver.config();
    let outcome = lowrank_core::complete(&samples, r, &cfg, a.solver.rank_tol)?;
    let problem = format!(
        "completion of a {}x{} matrix from {} samples, rank {}",
        a.rows,
        a.cols,
        samples.len(),
        r.get()
    );
    finish(&a.solver, problem, &outcome, &|m| proj_samples(m, &samples), Vec::new(), Vec::new())
}

fn constraint(a: &ApproxArgs) -> Result<EntryConstraint> {
    Ok(match a.constraint {
        ConstraintArg::None => EntryConstraint::Free,
        ConstraintArg::Nonneg => EntryConstraint::Nonneg,
        ConstraintArg::Box => {
            let (Some(lo), Some(hi)) = (a.lo, a.hi) else {
                anyhow::bail!(Error::InvalidParameter("--constraint box needs --lo and --hi".into()));
            };
            EntryConstraint::bounded(lo, hi)?
        }
    })
}

fn describe(c: EntryConstraint) -> String {
    match c {
        EntryConstraint::Free => "no entry constraint".into(),
        EntryConstraint::Nonneg => "nonnegative entries".into(),
        EntryConstraint::Box { lo, hi } => format!("entries in [{lo}, {hi}]"),
    }
}

pub fn approx(a: &ApproxArgs) -> Result<u8> {
    let n = read_matrix(&a.matrix)?;
    let r = rank_for(a.rank, n.rows(), n.cols())?;
    let c = constraint(a)?;
    let outcome = approximate(&n, r, c, &a.solver.config(), a.solver.rank_tol)?;
    let problem = format!("rank-{} approximation of a {}x{} matrix, {}", r.get(), n.rows(), n.cols(), describe(c));
    let error = n.distance(&outcome.solution)?;
    finish(
        &a.solver,
        problem,
        &outcome,
        &|m| c.project(m),
        vec![("error", format!("{error:e}"))],
        vec![format!("approximation error: {error:.9e}")],
    )
}

pub fn hankel(a: &HankelArgs) -> Result<u8> {
    let h = parse_sequence(&read(&a.sequence)?).with_context(|| format!("parsing {}", a.sequence.display()))?;
    let shape = HankelShape::new(a.rows, a.cols)?;
    let r = rank_for(a.rank, a.rows, a.cols)?;
    let out = hankel_reduce(&h, shape, r, &a.solver.config(), a.solver.rank_tol)?;
    if let Some(path) = &a.sequence_output {
        write(path, &format_sequence(&out.sequence))?;
    }
    let heuristic_rank = lowrank_core::numerical_rank(&out.heuristic, a.solver.rank_tol)?;
    let verdict = if out.error <= out.heuristic_error { "no worse than" } else { "worse than" };
    let notes = vec![
        format!("structure residual (anti-diagonal variance): {:.3e}", out.structure_residual),
        format!(
            "comparison: error {:.9e} is {verdict} truncate-then-project error {:.9e} (heuristic numerical rank {heuristic_rank})",
            out.error, out.heuristic_error
        ),
    ];
    let extra = vec![
        ("error", format!("{:e}", out.error)),
        ("heuristic_error", format!("{:e}", out.heuristic_error)),
        ("heuristic_rank", heuristic_rank.to_string()),
        ("structure_residual", format!("{:e}", out.structure_residual)),
        (
            "sequence",
            a.sequence_output.as_ref().map_or_else(|| "none".to_owned(), |p| p.display().to_string()),
        ),
    ];
    let problem = format!(
        "rank-{} Hankel approximation, {}x{} from {} samples",
        r.get(),
        a.rows,
        a.cols,
        h.len()
    );
    finish(&a.solver, problem, &out.run, &|m| Ok(proj_hankel(m)), extra, notes)
}
