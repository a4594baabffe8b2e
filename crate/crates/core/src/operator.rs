//! Proximal operators as values, so that the splitting solver can treat norm
//! terms and constraint sets uniformly.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::norms::{low_rank_inducing_fro_norm, Rank};
use crate::projections::{
    check_box, hankel_structure_residual, proj_box, proj_hankel, proj_nonneg, proj_samples,
    SampleSet,
};
use crate::prox::{check_positive, mat_prox, proj_rank, ProxKind, ProxParams};

/// A closed proper function `f` accessed through `prox_{γf}`.
pub trait ProxOperator {
    /// `argmin_x f(x) + ‖x − z‖²/(2γ)`.
    fn prox(&self, z: &Matrix, gamma: f64) -> Result<Matrix>;

    /// `f(x)`, if the operator knows how to evaluate it. Indicators return
    /// `+∞` outside their set.
    fn value(&self, _x: &Matrix) -> Option<f64> {
        None
    }
}

impl<T: ProxOperator + ?Sized> ProxOperator for &T {
    fn prox(&self, z: &Matrix, gamma: f64) -> Result<Matrix> {
        (**self).prox(z, gamma)
    }

    fn value(&self, x: &Matrix) -> Option<f64> {
        (**self).value(x)
    }
}

const FEASIBILITY_TOL: f64 = 1e-9;

fn indicator(violation: f64, x: &Matrix) -> f64 {
    if violation <= FEASIBILITY_TOL * x.frobenius_norm().max(1.0) {
        0.0
    } else {
        f64::INFINITY
    }
}

/// `weight · ‖X‖_{r*}` or `weight/2 · ‖X‖²_{r*}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormProx {
    pub kind: ProxKind,
    pub rank: Rank,
    pub weight: f64,
}

impl NormProx {
    pub fn new(kind: ProxKind, rank: Rank) -> Self {
        NormProx { kind, rank, weight: 1.0 }
    }

    pub fn weighted(kind: ProxKind, rank: Rank, weight: f64) -> Result<Self> {
        check_positive("weight", weight)?;
        Ok(NormProx { kind, rank, weight })
    }
}

fn norm_term(kind: ProxKind, x: &Matrix, rank: Rank) -> Option<f64> {
    let v = low_rank_inducing_fro_norm(x, rank).ok()?;
    Some(match kind {
        ProxKind::Norm => v,
        ProxKind::Squared => 0.5 * v * v,
    })
}

impl ProxOperator for NormProx {
    fn prox(&self, z: &Matrix, gamma: f64) -> Result<Matrix> {
        mat_prox(self.kind, z, ProxParams::new(gamma * self.weight, self.rank)?)
    }

    fn value(&self, x: &Matrix) -> Option<f64> {
        norm_term(self.kind, x, self.rank).map(|v| self.weight * v)
    }
}

/// `X ↦ g(X) − ⟨N, X⟩` where `g` is `‖·‖_{r*}` or `½‖·‖²_{r*}`.
///
/// With `g = ½‖·‖²_{r*}` this is, up to the constant `½‖N‖²_F`, the convex
/// envelope of `½‖N − X‖²_F + indicator(rank X ≤ r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedNormProx {
    pub kind: ProxKind,
    pub rank: Rank,
    pub shift: Matrix,
}

/// Builds the tilted operator; its prox at `Z` is the plain prox at `Z + γN`.
pub fn compose_linear_shift(kind: ProxKind, n: Matrix, rank: Rank) -> Result<ShiftedNormProx> {
    rank.check(n.min_dim())?;
    Ok(ShiftedNormProx { kind, rank, shift: n })
}

impl ShiftedNormProx {
    /// Prox with explicit parameters; the rank in `p` overrides the stored one.
    pub fn apply(&self, z: &Matrix, p: ProxParams) -> Result<Matrix> {
        let tilted = z.axpy(p.gamma, &self.shift)?;
        mat_prox(self.kind, &tilted, p)
    }
}

impl ProxOperator for ShiftedNormProx {
    fn prox(&self, z: &Matrix, gamma: f64) -> Result<Matrix> {
        self.apply(z, ProxParams::new(gamma, self.rank)?)
    }

    fn value(&self, x: &Matrix) -> Option<f64> {
        Some(norm_term(self.kind, x, self.rank)? - self.shift.inner(x).ok()?)
    }
}

/// Indicator of the matrices that agree with a sample set.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleConstraint(pub SampleSet);

impl ProxOperator for SampleConstraint {
    fn prox(&self, z: &Matrix, _gamma: f64) -> Result<Matrix> {
        proj_samples(z, &self.0)
    }

    fn value(&self, x: &Matrix) -> Option<f64> {
        let p = proj_samples(x, &self.0).ok()?;
        Some(indicator(p.distance(x).ok()?, x))
    }
}

/// Indicator of Hankel matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HankelConstraint;

impl ProxOperator for HankelConstraint {
    fn prox(&self, z: &Matrix, _gamma: f64) -> Result<Matrix> {
        Ok(proj_hankel(z))
    }

    fn value(&self, x: &Matrix) -> Option<f64> {
        Some(indicator(hankel_structure_residual(x).sqrt(), x))
    }
}

/// Elementwise constraints on the entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntryConstraint {
    /// No constraint (the prox is the identity).
    Free,
    Nonneg,
    Box { lo: f64, hi: f64 },
}

impl EntryConstraint {
    pub fn bounded(lo: f64, hi: f64) -> Result<Self> {
        check_box(lo, hi)?;
        Ok(EntryConstraint::Box { lo, hi })
    }

    pub fn project(&self, z: &Matrix) -> Result<Matrix> {
        match *self {
            EntryConstraint::Free => Ok(z.clone()),
            EntryConstraint::Nonneg => Ok(proj_nonneg(z)),
            EntryConstraint::Box { lo, hi } => proj_box(z, lo, hi),
        }
    }
}

impl ProxOperator for EntryConstraint {
    fn prox(&self, z: &Matrix, _gamma: f64) -> Result<Matrix> {
        self.project(z)
    }

    fn value(&self, x: &Matrix) -> Option<f64> {
        let p = self.project(x).ok()?;
        Some(indicator(p.distance(x).ok()?, x))
    }
}

/// Indicator of `rank X ≤ r`. Nonconvex: its "prox" is the truncated SVD,
/// usable in comparison runs without convergence guarantees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankConstraint(pub Rank);

impl ProxOperator for RankConstraint {
    fn prox(&self, z: &Matrix, _gamma: f64) -> Result<Matrix> {
        proj_rank(z, self.0)
    }

    fn value(&self, x: &Matrix) -> Option<f64> {
        let p = proj_rank(x, self.0).ok()?;
        Some(indicator(p.distance(x).ok()?, x))
    }
}

/// `f = 0`; the prox is the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Zero;

impl ProxOperator for Zero {
    fn prox(&self, z: &Matrix, _gamma: f64) -> Result<Matrix> {
        Ok(z.clone())
    }

    fn value(&self, _x: &Matrix) -> Option<f64> {
        Some(0.0)
    }
}

type ValueFn = Box<dyn Fn(&Matrix) -> f64>;

/// Adapter for user-supplied prox closures.
pub struct FnProx<P> {
    prox: P,
    value: Option<ValueFn>,
}

impl<P> FnProx<P>
where
    P: Fn(&Matrix, f64) -> Result<Matrix>,
{
    pub fn new(prox: P) -> Self {
        FnProx { prox, value: None }
    }

    pub fn with_value(mut self, value: impl Fn(&Matrix) -> f64 + 'static) -> Self {
        self.value = Some(Box::new(value));
        self
    }
}

impl<P> ProxOperator for FnProx<P>
where
    P: Fn(&Matrix, f64) -> Result<Matrix>,
{
    fn prox(&self, z: &Matrix, gamma: f64) -> Result<Matrix> {
        (self.prox)(z, gamma)
    }

    fn value(&self, x: &Matrix) -> Option<f64> {
        self.value.as_ref().map(|f| f(x))
    }
}

pub(crate) fn ensure_shape(out: &Matrix, expected: (usize, usize)) -> Result<()> {
    if out.shape() != expected {
        return Err(Error::Shape(format!(
            "prox returned {}x{}, expected {}x{}",
            out.rows(),
            out.cols(),
            expected.0,
            expected.1
        )));
    }
    Ok(())
}
