use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::averaging::{BodyKind, ConvexBodySpec};
use crate::error::{invalid, Result};
use crate::numeric::shard_rng;

/// Samples drawn per shard; each shard has its own seeded stream.
pub const SHARD_SAMPLES: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryEstimate {
    /// Monte Carlo estimate of `|{x : dist(x, boundary) < s}|`.
    pub estimate: f64,
    pub stderr: f64,
    /// `estimate / (s diam^(k-1))`.
    pub ratio: f64,
    pub samples: usize,
    /// False when distances are measured along rays through the centre,
    /// which overestimates them.
    pub exact_distance: bool,
}

/// Euclidean distance from `x` to the closest point of `[lo, hi]`'s
/// boundary.
fn box_boundary_distance(x: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    let mut outside = 0.0;
    let mut inside = f64::INFINITY;
    let mut is_inside = true;
    for i in 0..x.len() {
        let below = lo[i] - x[i];
        let above = x[i] - hi[i];
        let gap = below.max(above);
        if gap >= 0.0 {
            is_inside = false;
            outside += gap * gap;
        } else {
            inside = inside.min(-gap);
        }
    }
    if is_inside {
        inside
    } else {
        outside.sqrt()
    }
}

/// Euclidean projection distance from `x` to the unit `l^1` ball's
/// boundary.
fn cross_polytope_boundary_distance(x: &[f64]) -> f64 {
    let n1: f64 = x.iter().map(|v| v.abs()).sum();
    let d = x.len() as f64;
    if n1 <= 1.0 {
        // nearest facet hyperplane sign(x) . y = 1
        return (1.0 - n1) / d.sqrt();
    }
    // project |x| onto the simplex {y >= 0, sum y = 1}
    let mut a: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    a.sort_by(|p, q| q.total_cmp(p));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &v) in a.iter().enumerate() {
        cum += v;
        let t = (cum - 1.0) / (i + 1) as f64;
        if v - t > 0.0 {
            theta = t;
        }
    }
    x.iter()
        .map(|v| {
            let y = (v.abs() - theta).max(0.0);
            (v.abs() - y).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

/// Distance from `x` to the boundary of `body`, and whether it is exact.
pub fn boundary_distance(body: &ConvexBodySpec, x: &[f64]) -> (f64, bool) {
    match &body.kind {
        BodyKind::Box { .. } => {
            let (lo, hi) = body.bounding_box();
            (box_boundary_distance(x, &lo, &hi), true)
        }
        BodyKind::LqBall { q } if q.is_infinite() => {
            let one = vec![1.0; x.len()];
            let minus: Vec<f64> = one.iter().map(|v| -v).collect();
            (box_boundary_distance(x, &minus, &one), true)
        }
        BodyKind::LqBall { q } if *q == 2.0 => {
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            ((r - 1.0).abs(), true)
        }
        BodyKind::LqBall { q } if *q == 1.0 => (cross_polytope_boundary_distance(x), true),
        BodyKind::LqBall { .. } => {
            // boundary point on the ray through the centre is x / gauge(x)
            let g = body.gauge(x);
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if g == 0.0 {
                return (body.radial(&unit(x.len())), false);
            }
            (r * (1.0 - 1.0 / g).abs(), false)
        }
    }
}

fn unit(dim: usize) -> Vec<f64> {
    let mut u = vec![0.0; dim];
    u[0] = 1.0;
    u
}

/// Monte Carlo measure of the `s`-neighbourhood of the boundary of `body`,
/// sampling uniformly from the bounding box grown by `s`.
pub fn boundary_neighborhood_measure(
    body: &ConvexBodySpec,
    s: f64,
    samples: usize,
    seed: u64,
) -> Result<BoundaryEstimate> {
    body.validate()?;
    let diam = body.diameter();
    if !(s > 0.0 && s <= diam) {
        return Err(invalid!("neighbourhood width must lie in (0, {diam}], got {s}"));
    }
    if samples == 0 {
        return Err(invalid!("need at least one sample"));
    }
    let (lo, hi) = body.bounding_box();
    let lo: Vec<f64> = lo.iter().map(|v| v - s).collect();
    let hi: Vec<f64> = hi.iter().map(|v| v + s).collect();
    let box_volume: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let shards = samples.div_ceil(SHARD_SAMPLES);
    let exact = boundary_distance(body, &lo).1;
    let count_shard = |shard: usize| -> u64 {
        let n = SHARD_SAMPLES.min(samples - shard * SHARD_SAMPLES);
        let mut rng = shard_rng(seed, shard as u64);
        let mut x = vec![0.0; body.dim];
        let mut hits = 0u64;
        for _ in 0..n {
            for (i, xi) in x.iter_mut().enumerate() {
                *xi = lo[i] + (hi[i] - lo[i]) * rng.random::<f64>();
            }
            if boundary_distance(body, &x).0 < s {
                hits += 1;
            }
        }
        hits
    };
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(shards);
    // integer hit counts make the merge independent of scheduling
    let hits: u64 = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let count_shard = &count_shard;
                scope.spawn(move || (w..shards).step_by(workers).map(count_shard).sum::<u64>())
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sampling worker panicked")).sum()
    });
    let p = hits as f64 / samples as f64;
    let estimate = box_volume * p;
    let stderr = box_volume * (p * (1.0 - p) / samples as f64).sqrt();
    Ok(BoundaryEstimate {
        estimate,
        stderr,
        ratio: estimate / (s * diam.powi(body.dim as i32 - 1)),
        samples,
        exact_distance: exact,
    })
}

/// Exact neighbourhood measure where it has a closed form: boxes and the
/// cube in the plane, Euclidean balls in any dimension.
pub fn boundary_neighborhood_exact(body: &ConvexBodySpec, s: f64) -> Option<f64> {
    match &body.kind {
        BodyKind::LqBall { q } if *q == 2.0 => {
            let v = body.volume();
            let k = body.dim as i32;
            Some(v * ((1.0 + s).powi(k) - (1.0 - s).max(0.0).powi(k)))
        }
        BodyKind::LqBall { q } if body.dim == 2 && (q.is_infinite() || *q == 1.0) => {
            let side = if q.is_infinite() { 2.0 } else { 2f64.sqrt() };
            Some(rectangle_neighborhood(side, side, s))
        }
        BodyKind::Box { .. } if body.dim == 2 => {
            let (lo, hi) = body.bounding_box();
            Some(rectangle_neighborhood(hi[0] - lo[0], hi[1] - lo[1], s))
        }
        _ => None,
    }
}

fn rectangle_neighborhood(w: f64, h: f64, s: f64) -> f64 {
    let outer = 2.0 * (w + h) * s + PI * s * s;
    let inner = w * h - (w - 2.0 * s).max(0.0) * (h - 2.0 * s).max(0.0);
    outer + inner
}
