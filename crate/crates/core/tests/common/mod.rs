//! Slow, independent reference solvers for small instances plus random
//! instance generators. Shared by the integration test targets.
#![allow(dead_code)]

use lowrank_core::{vec_proj_top_r_ball, Matrix, Rank, SpectralVector};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Random instances

pub fn gaussian(rng: &mut TestRng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn gaussian_matrix(rng: &mut TestRng, rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols).map(|_| gaussian(rng)).collect();
    Matrix::new(rows, cols, data).unwrap()
}

/// Haar-ish orthogonal matrix from the QR factorization of a Gaussian one.
pub fn orthogonal(rng: &mut TestRng, n: usize) -> Matrix {
    let g = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    Matrix::from_nalgebra(&q)
}

pub fn low_rank_matrix(rng: &mut TestRng, rows: usize, cols: usize, rank: usize) -> Matrix {
    gaussian_matrix(rng, rows, rank).matmul(&gaussian_matrix(rng, rank, cols)).unwrap()
}

pub fn diag_rect(rows: usize, cols: usize, s: &[f64]) -> Matrix {
    Matrix::from_fn(rows, cols, |i, j| if i == j && i < s.len() { s[i] } else { 0.0 })
}

/// Matrix with prescribed singular values and random singular vectors.
pub fn with_spectrum(rng: &mut TestRng, rows: usize, cols: usize, s: &[f64]) -> Matrix {
    let u = orthogonal(rng, rows);
    let v = orthogonal(rng, cols);
    u.matmul(&diag_rect(rows, cols, s)).unwrap().matmul(&v.transpose()).unwrap()
}

pub fn log_uniform(rng: &mut TestRng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

/// Sorted nonnegative vector of length `d` on a random scale; about a
/// third of the draws contain repeated entries.
pub fn random_spectrum(rng: &mut TestRng, d: usize) -> SpectralVector {
    let scale = log_uniform(rng, 0.1, 10.0);
    let mut v: Vec<f64> = (0..d).map(|_| scale * gaussian(rng).abs()).collect();
    if d > 1 && rng.random_bool(0.35) {
        let a = rng.random_range(0..d);
        let b = rng.random_range(0..d);
        v[b] = v[a];
    }
    SpectralVector::from_unsorted(v).unwrap()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// ---------------------------------------------------------------------------
// Oracle configuration

#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    /// Target accuracy: stationarity tolerance for descent, value spread for
    /// restarts.
    pub tol: f64,
    pub max_steps: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { tol: 1e-13, max_steps: 200_000, restarts: 5, seed: 7 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    DimensionTooLarge { dim: usize, cap: usize },
    BadConfig(&'static str),
    BadInput(&'static str),
}

impl OracleConfig {
    fn validate(&self) -> Result<(), OracleError> {
        if !(self.tol > 0.0) {
            return Err(OracleError::BadConfig("tol must be positive"));
        }
        if self.restarts == 0 || self.max_steps == 0 {
            return Err(OracleError::BadConfig("restarts and max_steps must be positive"));
        }
        Ok(())
    }
}

fn cap(dim: usize, cap: usize) -> Result<(), OracleError> {
    if dim > cap {
        Err(OracleError::DimensionTooLarge { dim, cap })
    } else {
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Projected descent on the sorted nonnegative cone

/// Euclidean projection onto `{x : x_1 ≥ x_2 ≥ … ≥ x_d ≥ 0}`: pool adjacent
/// violators for the nonincreasing fit, then clamp at zero.
pub fn project_sorted_cone(v: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(v.len());
    for &x in v {
        blocks.push((x, 1));
        while blocks.len() >= 2 {
            let (s1, n1) = blocks[blocks.len() - 1];
            let (s0, n0) = blocks[blocks.len() - 2];
            if s1 / n1 as f64 > s0 / n0 as f64 {
                blocks.pop();
                *blocks.last_mut().unwrap() = (s0 + s1, n0 + n1);
            } else {
                break;
            }
        }
    }
    let mut out = Vec::with_capacity(v.len());
    for (s, n) in blocks {
        out.extend(std::iter::repeat_n((s / n as f64).max(0.0), n));
    }
    out
}

/// `½‖x − z‖² + penalty(x)` with a penalty that is smooth on the sorted
/// nonnegative cone.
pub trait ConeObjective {
    fn anchor(&self) -> &[f64];
    fn penalty(&self, x: &[f64]) -> f64;
    /// Gradient of the penalty on the cone, added into `out`.
    fn add_penalty_grad(&self, x: &[f64], out: &mut [f64]);
    /// Lipschitz constant of the penalty gradient.
    fn penalty_lipschitz(&self) -> f64;

    fn value(&self, x: &[f64]) -> f64 {
        0.5 * dist(x, self.anchor()).powi(2) + self.penalty(x)
    }

    fn grad(&self, x: &[f64], out: &mut [f64]) {
        for ((o, xi), zi) in out.iter_mut().zip(x).zip(self.anchor()) {
            *o = xi - zi;
        }
        self.add_penalty_grad(x, out);
    }
}

pub struct Quadratic(pub Vec<f64>);

impl ConeObjective for Quadratic {
    fn anchor(&self) -> &[f64] {
        &self.0
    }
    fn penalty(&self, _x: &[f64]) -> f64 {
        0.0
    }
    fn add_penalty_grad(&self, _x: &[f64], _out: &mut [f64]) {}
    fn penalty_lipschitz(&self) -> f64 {
        0.0
    }
}

/// `γ Σ x_i`, which equals `γ‖x‖_1` on the cone.
pub struct L1 {
    pub z: Vec<f64>,
    pub gamma: f64,
}

impl ConeObjective for L1 {
    fn anchor(&self) -> &[f64] {
        &self.z
    }
    fn penalty(&self, x: &[f64]) -> f64 {
        self.gamma * x.iter().map(|v| v.abs()).sum::<f64>()
    }
    fn add_penalty_grad(&self, _x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o += self.gamma);
    }
    fn penalty_lipschitz(&self) -> f64 {
        0.0
    }
}

/// `β/2 · Σ_{i≤r} x_i²`; on the cone the first `r` entries are the largest.
pub struct TopRSquares {
    pub z: Vec<f64>,
    pub r: usize,
    pub beta: f64,
}

impl ConeObjective for TopRSquares {
    fn anchor(&self) -> &[f64] {
        &self.z
    }
    fn penalty(&self, x: &[f64]) -> f64 {
        let mut sq: Vec<f64> = x.iter().map(|v| v * v).collect();
        sq.sort_by(|a, b| b.total_cmp(a));
        0.5 * self.beta * sq[..self.r].iter().sum::<f64>()
    }
    fn add_penalty_grad(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.r {
            out[i] += self.beta * x[i];
        }
    }
    fn penalty_lipschitz(&self) -> f64 {
        self.beta
    }
}

/// Accelerated projected gradient with adaptive restart from `x0`. Stops
/// when the plain projected-gradient step moves less than `tol`.
fn descend(obj: &dyn ConeObjective, x0: Vec<f64>, cfg: &OracleConfig) -> Vec<f64> {
    let d = x0.len();
    let step = 1.0 / (1.0 + obj.penalty_lipschitz());
    let stop = cfg.tol * (1.0 + norm(obj.anchor()));
    let mut x = project_sorted_cone(&x0);
    let mut y = x.clone();
    let mut t = 1.0_f64;
    let mut g = vec![0.0; d];
    let mut trial = vec![0.0; d];
    for _ in 0..cfg.max_steps {
        obj.grad(&y, &mut g);
        for i in 0..d {
            trial[i] = y[i] - step * g[i];
        }
        let next = project_sorted_cone(&trial);
        // Restart momentum when it points uphill.
        let uphill: f64 = (0..d).map(|i| (y[i] - next[i]) * (next[i] - x[i])).sum();
        let t_next = if uphill > 0.0 { 1.0 } else { 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt()) };
        let momentum = if uphill > 0.0 { 0.0 } else { (t - 1.0) / t_next };
        for i in 0..d {
            y[i] = next[i] + momentum * (next[i] - x[i]);
        }
        x = next;
        t = t_next;

        obj.grad(&x, &mut g);
        for i in 0..d {
            trial[i] = x[i] - step * g[i];
        }
        if dist(&project_sorted_cone(&trial), &x) <= stop {
            break;
        }
    }
    x
}

/// Minimizes a [`ConeObjective`] over the sorted nonnegative cone from
/// several seeded random starts and returns the best point found.
pub fn prox_oracle(obj: &dyn ConeObjective, cfg: &OracleConfig) -> Result<Vec<f64>, OracleError> {
    cfg.validate()?;
    let z = obj.anchor();
    cap(z.len(), 8)?;
    Ok(restart_values(obj, cfg).into_iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap().0)
}

/// Every restart's end point and objective value.
pub fn restart_values(obj: &dyn ConeObjective, cfg: &OracleConfig) -> Vec<(Vec<f64>, f64)> {
    let z = obj.anchor();
    let scale = 1.0 + norm(z);
    let mut rng = rng(cfg.seed);
    (0..cfg.restarts)
        .map(|k| {
            let start: Vec<f64> = if k == 0 {
                z.to_vec()
            } else {
                z.iter().map(|v| v + scale * gaussian(&mut rng)).collect()
            };
            let x = descend(obj, start, cfg);
            let v = obj.value(&x);
            (x, v)
        })
        .collect()
}

/// Projection onto `{x : Σ_{i≤r} x_[i]² ≤ ρ²}` by bisection on the
/// multiplier, each inner problem solved by [`prox_oracle`].
pub fn ball_oracle(z: &[f64], r: usize, radius: f64, cfg: &OracleConfig) -> Result<Vec<f64>, OracleError> {
    cfg.validate()?;
    cap(z.len(), 8)?;
    if !(radius > 0.0) || r == 0 || r > z.len() {
        return Err(OracleError::BadInput("radius must be positive and 1 ≤ r ≤ d"));
    }
    let top = |x: &[f64]| norm(&x[..r]);
    if top(z) <= radius {
        return Ok(z.to_vec());
    }
    let inner_cfg = OracleConfig { restarts: 1, ..*cfg };
    let solve = |mu: f64, warm: &[f64]| {
        let obj = TopRSquares { z: z.to_vec(), r, beta: mu };
        descend(&obj, warm.to_vec(), &inner_cfg)
    };
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut x_hi = solve(hi, z);
    while top(&x_hi) > radius {
        lo = hi;
        hi *= 2.0;
        x_hi = solve(hi, &x_hi);
    }
    let mut warm = x_hi.clone();
    for _ in 0..200 {
        if hi - lo <= 1e-15 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let x = solve(mid, &warm);
        if top(&x) > radius {
            lo = mid;
        } else {
            hi = mid;
            x_hi = x.clone();
        }
        warm = x;
    }
    Ok(x_hi)
}

// ---------------------------------------------------------------------------
// Variational oracles for the k-support norm
//
// ‖x‖²_(k) = min { Σ x_i²/θ_i : 0 < θ_i ≤ 1, Σ θ_i ≤ k }. Minimizing over x
// first for fixed θ leaves a separable problem in θ whose solution is
// θ_i = clip(|z_i|·s − c, 0, 1) with s chosen so that Σ θ_i = k.

fn theta(z: &[f64], c: f64, s: f64) -> Vec<f64> {
    z.iter().map(|v| (v.abs() * s - c).clamp(0.0, 1.0)).collect()
}

/// Optimal weights for `min_θ Σ z_i²/(θ_i + c)` over the capped simplex.
fn optimal_theta(z: &[f64], r: usize, c: f64) -> Vec<f64> {
    let active = z.iter().filter(|v| **v != 0.0).count();
    let target = r.min(active) as f64;
    let sum = |s: f64| theta(z, c, s).iter().sum::<f64>();
    if target == 0.0 {
        return vec![0.0; z.len()];
    }
    let mut hi = 1.0;
    while sum(hi) < target {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sum(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    theta(z, c, hi)
}

/// Prox of `γ/2 · ‖·‖²_(r)` at a sorted nonnegative `z`.
pub fn rstar_sq_oracle(z: &[f64], r: usize, gamma: f64) -> Vec<f64> {
    let th = optimal_theta(z, r, gamma);
    z.iter().zip(&th).map(|(v, t)| v * t / (t + gamma)).collect()
}

/// Prox of `γ · ‖·‖_(r)`, using `‖x‖ = min_η (‖x‖²/η + η)/2` and bisection
/// on the stationarity condition `η = ‖x(η)‖`.
pub fn rstar_norm_oracle(z: &[f64], r: usize, gamma: f64) -> Vec<f64> {
    // x = 0 exactly when the dual norm of z is at most γ.
    let mut sq: Vec<f64> = z.iter().map(|v| v * v).collect();
    sq.sort_by(|a, b| b.total_cmp(a));
    if sq[..r].iter().sum::<f64>().sqrt() <= gamma {
        return vec![0.0; z.len()];
    }
    let x_at = |eta: f64| {
        let c = gamma / eta;
        let th = optimal_theta(z, r, c);
        let x: Vec<f64> = z.iter().zip(&th).map(|(v, t)| v * t / (t + c)).collect();
        let norm_sq: f64 = x.iter().zip(&th).filter(|(_, t)| **t > 0.0).map(|(v, t)| v * v / t).sum();
        (x, norm_sq)
    };
    let mut lo = 0.0;
    let mut hi = z.iter().map(|v| v.abs()).sum::<f64>();
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (_, n2) = x_at(mid);
        if n2 > mid * mid {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    x_at(0.5 * (lo + hi)).0
}

// ---------------------------------------------------------------------------
// Dual norm by projected ascent

/// `max ⟨z, y⟩` over the unit ball of the truncated norm, by projected
/// ascent `y ← P(y + s·z)` with a geometrically growing step `s`.
pub fn dual_norm_oracle(z: &SpectralVector, r: Rank, cfg: &OracleConfig) -> Result<f64, OracleError> {
    cfg.validate()?;
    cap(z.len(), 6)?;
    let zs = z.as_slice();
    if zs[0] == 0.0 {
        return Ok(0.0);
    }
    let mut rng = rng(cfg.seed);
    let mut best = f64::NEG_INFINITY;
    for k in 0..cfg.restarts {
        let start = if k == 0 {
            vec![0.0; zs.len()]
        } else {
            (0..zs.len()).map(|_| gaussian(&mut rng).abs()).collect()
        };
        let mut y = SpectralVector::from_unsorted(start).unwrap();
        let mut s = 1e-2 / z.norm();
        for _ in 0..cfg.max_steps.min(400) {
            let moved: Vec<f64> = y.as_slice().iter().zip(zs).map(|(a, b)| a + s * b).collect();
            y = vec_proj_top_r_ball(&SpectralVector::new(moved).unwrap(), r, 1.0).unwrap();
            best = best.max(dot(y.as_slice(), zs));
            if s * z.norm() > 1e14 {
                break;
            }
            s *= 1.5;
        }
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Envelope of the rank-constrained quadratic on symmetric 2×2 matrices

/// Grid of biconjugate values of `½‖N − X‖² + indicator(rank X ≤ r)` at the
/// symmetric matrices `[[a, b], [b, c]]` with `a, b, c` on `axis`.
pub struct EnvelopeGrid {
    pub axis: Vec<f64>,
    /// Indexed `[(ia * n + ib) * n + ic]`.
    pub values: Vec<f64>,
}

impl EnvelopeGrid {
    pub fn point(&self, ia: usize, ib: usize, ic: usize) -> Matrix {
        let (a, b, c) = (self.axis[ia], self.axis[ib], self.axis[ic]);
        Matrix::new(2, 2, vec![a, b, b, c]).unwrap()
    }

    pub fn value(&self, ia: usize, ib: usize, ic: usize) -> f64 {
        let n = self.axis.len();
        self.values[(ia * n + ib) * n + ic]
    }
}

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Orthonormal coordinates of a symmetric 2×2 matrix.
fn sym_coords(a: f64, b: f64, c: f64) -> [f64; 3] {
    [a, SQRT2 * b, c]
}

/// Largest-magnitude eigenpair of `[[a, b], [b, c]]`.
fn dominant_eigen(a: f64, b: f64, c: f64) -> (f64, [f64; 2]) {
    let mean = 0.5 * (a + c);
    let rad = (0.5 * (a - c)).hypot(b);
    let lambda = if mean >= 0.0 { mean + rad } else { mean - rad };
    if rad == 0.0 {
        return (lambda, [1.0, 0.0]);
    }
    let v1 = [b, lambda - a];
    let v2 = [lambda - c, b];
    let v = if v1[0].hypot(v1[1]) >= v2[0].hypot(v2[1]) { v1 } else { v2 };
    let n = v[0].hypot(v[1]);
    (lambda, [v[0] / n, v[1] / n])
}

/// Conjugate `sup_{rank X ≤ r} ⟨X, Y⟩ − ½‖N − X‖²` at `M = N + Y` (minus the
/// constant `½‖N‖²`) and a supergradient direction for `⟨X,Y⟩ − f*(Y)`.
fn conjugate_part(m: [f64; 3], full_rank: bool) -> (f64, [f64; 3]) {
    let (a, b, c) = (m[0], m[1] / SQRT2, m[2]);
    if full_rank {
        return (0.5 * (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]), m);
    }
    let (lambda, q) = dominant_eigen(a, b, c);
    let g = sym_coords(lambda * q[0] * q[0], lambda * q[0] * q[1], lambda * q[1] * q[1]);
    (0.5 * lambda * lambda, g)
}

/// `sup_Y ⟨X, Y⟩ − f*(Y)` by the central-cut ellipsoid method on a ball of
/// radius 50 around the origin. The bound `sqrt(gᵀPg)` on the remaining
/// gap stops the iteration.
fn biconjugate_at(x: [f64; 3], n: [f64; 3], n_sq: f64, full_rank: bool) -> f64 {
    const DIM: f64 = 3.0;
    let mut center = [0.0; 3];
    let mut p = [[0.0; 3]; 3];
    for (i, row) in p.iter_mut().enumerate() {
        row[i] = 2500.0;
    }
    let mut best = f64::NEG_INFINITY;
    for _ in 0..5000 {
        let m = [n[0] + center[0], n[1] + center[1], n[2] + center[2]];
        let (conj, grad_conj) = conjugate_part(m, full_rank);
        let value = dot(&x, &center) - (conj - 0.5 * n_sq);
        best = best.max(value);
        let g = [x[0] - grad_conj[0], x[1] - grad_conj[1], x[2] - grad_conj[2]];
        let pg = [
            p[0][0] * g[0] + p[0][1] * g[1] + p[0][2] * g[2],
            p[1][0] * g[0] + p[1][1] * g[1] + p[1][2] * g[2],
            p[2][0] * g[0] + p[2][1] * g[1] + p[2][2] * g[2],
        ];
        let gpg = dot(&g, &pg);
        if gpg.sqrt() < 1e-9 {
            break;
        }
        let h = [pg[0] / gpg.sqrt(), pg[1] / gpg.sqrt(), pg[2] / gpg.sqrt()];
        for i in 0..3 {
            center[i] += h[i] / (DIM + 1.0);
        }
        let scale = DIM * DIM / (DIM * DIM - 1.0);
        for i in 0..3 {
            for j in 0..3 {
                p[i][j] = scale * (p[i][j] - 2.0 / (DIM + 1.0) * h[i] * h[j]);
            }
        }
    }
    best
}

pub fn envelope_oracle(n: &Matrix, r: usize, points: usize) -> Result<EnvelopeGrid, OracleError> {
    if points < 20 {
        return Err(OracleError::BadInput("grid needs at least 20 points per axis"));
    }
    if n.shape() != (2, 2) {
        return Err(OracleError::BadInput("envelope oracle is 2x2 only"));
    }
    if n.get(0, 1) != n.get(1, 0) {
        return Err(OracleError::BadInput("N must be symmetric"));
    }
    if !(r == 1 || r == 2) {
        return Err(OracleError::BadInput("rank must be 1 or 2"));
    }
    let nc = sym_coords(n.get(0, 0), n.get(0, 1), n.get(1, 1));
    let n_sq = dot(&nc, &nc);
    let axis: Vec<f64> = (0..points).map(|k| -2.0 + 4.0 * k as f64 / (points - 1) as f64).collect();
    let mut values = Vec::with_capacity(points.pow(3));
    for &a in &axis {
        for &b in &axis {
            for &c in &axis {
                values.push(biconjugate_at(sym_coords(a, b, c), nc, n_sq, r == 2));
            }
        }
    }
    Ok(EnvelopeGrid { axis, values })
}
