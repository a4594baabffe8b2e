//! Seeded problem instances shared by the benchmarks.

use lowrank_core::{Matrix, SampleSet, SpectralVector};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(g: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| g.sample(StandardNormal))
}

/// Product of Gaussian `rows×k` and `k×cols` factors.
pub fn low_rank_matrix(g: &mut impl Rng, rows: usize, cols: usize, k: usize) -> Matrix {
    let a = gaussian_matrix(g, rows, k);
    let b = gaussian_matrix(g, k, cols);
    a.matmul(&b).expect("inner dimensions agree")
}

/// Sorted nonnegative vector with a few repeated entries.
pub fn spectrum(g: &mut impl Rng, d: usize) -> SpectralVector {
    let mut v: Vec<f64> = (0..d).map(|_| g.sample::<f64, _>(StandardNormal).abs() * 3.0).collect();
    for i in 1..d {
        if g.random_bool(0.2) {
            v[i] = v[i - 1];
        }
    }
    SpectralVector::from_unsorted(v).expect("entries are finite and nonnegative")
}

/// Uniformly sampled entries of a random rank-`k` `n×n` matrix.
pub fn completion_instance(seed: u64, n: usize, k: usize, observed: f64) -> SampleSet {
    let mut g = rng(seed);
    let truth = low_rank_matrix(&mut g, n, n, k);
    let count = ((n * n) as f64 * observed).round() as usize;
    let entries = sample(&mut g, n * n, count)
        .into_iter()
        .map(|idx| (idx / n, idx % n, truth.get(idx / n, idx % n)))
        .collect();
    SampleSet::new(n, n, entries).expect("indices are in range and distinct")
}
