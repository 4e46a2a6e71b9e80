use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::averaging::CanonicalMapSpec;
use crate::error::{invalid, Result};
use crate::fourier::QuasiNorm;
use crate::numeric::shard_rng;

/// `xi -> max_gamma |xi_gamma|^(1/|gamma|)`, homogeneous of degree one
/// under `t^A`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QuasiNormSpec {
    pub map: CanonicalMapSpec,
}

impl QuasiNormSpec {
    pub fn new(map: CanonicalMapSpec) -> Self {
        Self { map }
    }

    pub fn eval(&self, xi: &[f64]) -> f64 {
        quasi_norm(&self.map, xi)
    }
}

impl QuasiNorm for QuasiNormSpec {
    fn eval(&self, xi: &[f64]) -> f64 {
        quasi_norm(&self.map, xi)
    }
}

pub fn quasi_norm(map: &CanonicalMapSpec, xi: &[f64]) -> f64 {
    xi.iter()
        .zip(map.degrees())
        .map(|(&x, d)| match d {
            1 => x.abs(),
            2 => x.abs().sqrt(),
            _ => x.abs().powf(1.0 / f64::from(d)),
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiTriangleReport {
    pub scales: Vec<f64>,
    /// Largest `q(xi + eta) / (q(xi) + q(eta))` at each scale.
    pub per_scale: Vec<f64>,
    pub constant: f64,
    pub pairs: usize,
}

/// Measures the quasi-triangle constant on random pairs `t^A xi, t^A eta`
/// with Gaussian `xi, eta`, `pairs` per scale.
pub fn quasi_triangle_constant(
    spec: &QuasiNormSpec,
    scales: &[f64],
    pairs: usize,
    seed: u64,
) -> Result<QuasiTriangleReport> {
    if scales.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(invalid!("scales must be positive"));
    }
    let m = spec.map.target_dim();
    let mut per_scale = Vec::with_capacity(scales.len());
    for (i, &t) in scales.iter().enumerate() {
        let mut rng = shard_rng(seed, i as u64);
        let mut worst: f64 = 0.0;
        for _ in 0..pairs {
            let a: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
            let b: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
            let a = spec.map.dilate(t, &a);
            let b = spec.map.dilate(t, &b);
            let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            let den = spec.eval(&a) + spec.eval(&b);
            if den > 0.0 {
                worst = worst.max(spec.eval(&sum) / den);
            }
        }
        per_scale.push(worst);
    }
    Ok(QuasiTriangleReport {
        scales: scales.to_vec(),
        constant: per_scale.iter().copied().fold(0.0, f64::max),
        per_scale,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parabola() -> QuasiNormSpec {
        QuasiNormSpec::new(CanonicalMapSpec::curve(&[1, 2]).unwrap())
    }

    #[test]
    fn evaluation_and_homogeneity() {
        let q = parabola();
        assert_eq!(q.eval(&[0.0, 0.0]), 0.0);
        assert_eq!(q.eval(&[4.0, 9.0]), 4.0);
        assert_eq!(q.eval(&[-1.0, 9.0]), 3.0);
        let xi = [0.3, -0.7];
        assert_eq!(q.eval(&q.map.dilate(2.0, &xi)), 2.0 * q.eval(&xi));
    }

    #[test]
    fn triangle_constant_is_one() {
        // each |a + b|^(1/m) <= |a|^(1/m) + |b|^(1/m)
        let r = quasi_triangle_constant(&parabola(), &[0.01, 1.0, 100.0], 2000, 4).unwrap();
        assert!(r.constant <= 1.0 + 1e-12);
        assert!(r.constant > 0.9);
    }
}
