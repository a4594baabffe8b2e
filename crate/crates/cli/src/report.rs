use std::fmt::{self, Display};
use std::path::PathBuf;

use lowrank_core::problems::RunOutcome;
use lowrank_core::Termination;

/// Human-readable summary followed by a `key=value` block for scripts.
pub struct RunReport<'a> {
    pub problem: String,
    pub outcome: &'a RunOutcome,
    pub solution_path: Option<PathBuf>,
    pub trace_path: Option<PathBuf>,
    /// Problem-specific `key=value` pairs appended after the common ones.
    pub extra: Vec<(&'static str, String)>,
    /// Lines appended to the human-readable block.
    pub notes: Vec<String>,
}

impl RunReport<'_> {
    pub fn exit_code(&self) -> i32 {
        match (self.outcome.termination(), self.outcome.certificate.tight) {
            (Termination::Converged, true) => 0,
            (Termination::Converged, false) => 2,
            (Termination::MaxIter, _) => 3,
        }
    }
}

fn path_or_stdout(p: &Option<PathBuf>) -> String {
    p.as_ref().map_or_else(|| "-".to_owned(), |p| p.display().to_string())
}

impl Display for RunReport<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let out = self.outcome;
        let cert = &out.certificate;
        let cfg = &out.config;
        let trace = &out.trace;

        writeln!(f, "problem: {}", self.problem)?;
        writeln!(
            f,
            "termination: {} after {} iterations (residual {:.3e}, tol {:.1e})",
            trace.termination,
            trace.iterations(),
            trace.final_residual(),
            cfg.tol
        )?;
        writeln!(
            f,
            "certificate: {} (numerical rank {} at tolerance {:.1e})",
            if cert.tight { "tight" } else { "not tight" },
            cert.numerical_rank,
            cert.rank_tol
        )?;
        if cert.upper_bound.is_finite() {
            writeln!(
                f,
                "bounds: {:.9e} <= optimum <= {:.9e} (gap {:.3e})",
                cert.lower_bound,
                cert.upper_bound,
                cert.gap()
            )?;
        } else {
            writeln!(f, "bounds: {:.9e} <= optimum (no feasible rank-r candidate found)", cert.lower_bound)?;
        }
        for note in &self.notes {
            writeln!(f, "{note}")?;
        }
        writeln!(f, "wall time: {:.3} s", out.elapsed.as_secs_f64())?;
        writeln!(f)?;

        let pairs: Vec<(&str, String)> = vec![
            ("termination", trace.termination.to_string()),
            ("iterations", trace.iterations().to_string()),
            ("residual", format!("{:e}", trace.final_residual())),
            ("tight", cert.tight.to_string()),
            ("numerical_rank", cert.numerical_rank.to_string()),
            ("lower_bound", format!("{:e}", cert.lower_bound)),
            ("upper_bound", format!("{:e}", cert.upper_bound)),
            ("gap", format!("{:e}", cert.gap())),
            ("wall_time_s", format!("{:.6}", out.elapsed.as_secs_f64())),
            ("solution", path_or_stdout(&self.solution_path)),
            ("trace", self.trace_path.as_ref().map_or_else(|| "none".to_owned(), |p| p.display().to_string())),
            ("gamma", cfg.gamma.to_string()),
            ("lambda", cfg.lambda.to_string()),
            ("tol", format!("{:e}", cfg.tol)),
            ("max_iter", cfg.max_iter.to_string()),
            ("rank_tol", format!("{:e}", cert.rank_tol)),
        ];
        for (k, v) in pairs.iter().map(|(k, v)| (*k, v)).chain(self.extra.iter().map(|(k, v)| (*k, v))) {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}
