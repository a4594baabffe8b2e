//! Low-rank optimization with convex constraints.
//!
//! The low-rank inducing Frobenius norm `‖·‖_{r*}` is the dual of the
//! truncated Frobenius norm (the Euclidean norm of the `r` largest singular
//! values). Its square is the convex envelope of `‖·‖²_F` restricted to
//! matrices of rank at most `r`, so convex relaxations built from it are
//! often tight. This crate provides:
//!
//! * the norms and their exact proximal operators ([`norms`], [`prox`]),
//! * projections onto common constraint sets ([`projections`]),
//! * Douglas–Rachford splitting over prox operators ([`dr`], [`operator`]),
//! * rank certificates and optimality gap bounds ([`certificate`]),
//! * completion, approximation and Hankel drivers ([`problems`]),
//! * text formats for the command line ([`io`]).

pub mod certificate;
pub mod dr;
pub mod error;
pub mod io;
pub mod linalg;
pub mod norms;
pub mod operator;
pub mod problems;
pub mod projections;
pub mod prox;

pub use certificate::{
    certify, gap_bounds, numerical_rank, tightness_check, ApproximationObjective, Certificate,
    CompletionObjective, GapBounds, ObjectivePair, DEFAULT_RANK_TOL,
};
pub use dr::{dr_solve, DrConfig, DrSolution, DrTrace, IterRecord, Termination};
pub use error::{Error, Result};
pub use linalg::{apply_spectral, reconstruct, singular_values, svd, Matrix, SpectralVector, SvdFactors};
pub use norms::{
    frobenius_norm, ksup_norm_vec, low_rank_inducing_fro_norm, truncated_fro_norm,
    truncated_norm_vec, Rank,
};
pub use operator::{
    compose_linear_shift, EntryConstraint, FnProx, HankelConstraint, NormProx, ProxOperator,
    RankConstraint, SampleConstraint, ShiftedNormProx, Zero,
};
pub use problems::{approximate, complete, hankel_reduce, HankelOutcome, RunOutcome};
pub use projections::{
    hankel_from_sequence, hankel_structure_residual, proj_box, proj_hankel, proj_nonneg,
    proj_samples, sequence_from_hankel, HankelShape, SampleSet,
};
pub use prox::{
    mat_prox, proj_rank, top_r_sq_kkt_residual, vec_proj_top_r_ball, vec_prox, vec_prox_rstar_norm,
    vec_prox_rstar_sq, vec_prox_top_r_sq, ProxKind, ProxParams,
};
