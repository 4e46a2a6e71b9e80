use rand::Rng;
use rand_distr::StandardNormal;

use crate::numeric::{log_space, shard_rng};

/// Unit directions: the `d` coordinate axes followed by `extra` random
/// directions drawn from the seeded generator.
pub fn directions(dims: usize, extra: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = (0..dims)
        .map(|i| (0..dims).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut rng = shard_rng(seed, 0x6469);
    while out.len() < dims + extra {
        let v: Vec<f64> = (0..dims).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-6 {
            out.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    out
}

/// Frequencies `r u` with `r` log-spaced on `[lo, hi]` and `u` ranging over
/// [`directions`].
pub fn radial_grid(dims: usize, magnitudes: usize, extra_dirs: usize, lo: f64, hi: f64, seed: u64) -> Vec<Vec<f64>> {
    let radii = log_space(lo, hi, magnitudes);
    let dirs = directions(dims, extra_dirs, seed);
    let mut out = Vec::with_capacity(radii.len() * dirs.len());
    for u in &dirs {
        for &r in &radii {
            out.push(u.iter().map(|x| r * x).collect());
        }
    }
    out
}

/// `n` seeded points of `[-1/2, 1/2)^d` with log-uniform magnitudes spread
/// over `[2^-12, 1/2]` along random directions, clipped into the cube.
pub fn torus_grid(dims: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = shard_rng(seed, 0x746f);
    let (lo, hi) = ((2f64).powi(-12).ln(), 0.5f64.ln());
    (0..n)
        .map(|_| {
            let r = rng.random_range(lo..hi).exp();
            let v: Vec<f64> = (0..dims).map(|_| rng.sample(StandardNormal)).collect();
            let norm = v.iter().map(|x: &f64| x * x).sum::<f64>().sqrt().max(1e-300);
            v.into_iter()
                .map(|x| (r * x / norm).clamp(-0.5, 0.5 - 1e-12))
                .collect()
        })
        .collect()
}
