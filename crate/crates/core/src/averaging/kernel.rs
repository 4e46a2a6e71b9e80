use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::modulus::ModulusOfContinuity;
use crate::error::{invalid, Result};
use crate::fourier::euclidean_norm;
use crate::numeric::{shard_rng, GaussLegendre};

type KernelFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum KernelKind {
    /// `1/y` on `R \ {0}`.
    Hilbert,
    /// `x_component / |x|^(dim+1)` on `R^dim \ {0}`.
    Riesz { dim: usize, component: usize },
    Zero { dim: usize },
    #[serde(skip)]
    Custom { dim: usize, label: String, eval: KernelFn },
}

impl fmt::Debug for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Hilbert => write!(f, "Hilbert"),
            Self::Riesz { dim, component } => write!(f, "Riesz {{ dim: {dim}, component: {component} }}"),
            Self::Zero { dim } => write!(f, "Zero {{ dim: {dim} }}"),
            Self::Custom { dim, label, .. } => write!(f, "Custom {{ dim: {dim}, label: {label:?} }}"),
        }
    }
}

/// How the vanishing of `int_(Omega_R \ Omega_r) K` is certified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Cancellation {
    /// `K(-x) = -K(x)`; exact on every symmetric `Omega`.
    Odd,
    /// Shell integrals over Euclidean annuli below `tol` in absolute value.
    Numeric { tol: f64 },
}

/// A real Calderón–Zygmund kernel with its size constant and modulus.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelSpec {
    #[serde(flatten)]
    pub kind: KernelKind,
    pub size_constant: f64,
    pub modulus: ModulusOfContinuity,
    pub cancellation: Cancellation,
}

impl KernelSpec {
    /// `1/y` with size constant 1 and `omega(t) = 2t`.
    pub fn hilbert() -> Self {
        Self {
            kind: KernelKind::Hilbert,
            size_constant: 1.0,
            modulus: ModulusOfContinuity::linear(2.0),
            cancellation: Cancellation::Odd,
        }
    }

    /// `x_c / |x|^(k+1)` with size constant 1. Its gradient is at most
    /// `2|z|^(-k-1)` and `|x + sy| >= |x|/2`, so `omega(t) = 2^(k+2) t`.
    pub fn riesz(dim: usize, component: usize) -> Result<Self> {
        if component >= dim {
            return Err(invalid!("component {component} out of range for dimension {dim}"));
        }
        Ok(Self {
            kind: KernelKind::Riesz { dim, component },
            size_constant: 1.0,
            modulus: ModulusOfContinuity::linear(2f64.powi(dim as i32 + 2)),
            cancellation: Cancellation::Odd,
        })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            kind: KernelKind::Zero { dim },
            size_constant: 1.0,
            modulus: ModulusOfContinuity::Zero,
            cancellation: Cancellation::Odd,
        }
    }

    pub fn custom<F>(
        dim: usize,
        label: impl Into<String>,
        eval: F,
        size_constant: f64,
        modulus: ModulusOfContinuity,
        cancellation: Cancellation,
    ) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            kind: KernelKind::Custom {
                dim,
                label: label.into(),
                eval: Arc::new(eval),
            },
            size_constant,
            modulus,
            cancellation,
        }
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            KernelKind::Hilbert => 1,
            KernelKind::Riesz { dim, .. } | KernelKind::Zero { dim } | KernelKind::Custom { dim, .. } => *dim,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.kind {
            KernelKind::Hilbert => 1.0 / x[0],
            KernelKind::Riesz { dim, component } => x[*component] / euclidean_norm(x).powi(*dim as i32 + 1),
            KernelKind::Zero { .. } => 0.0,
            KernelKind::Custom { eval, .. } => eval(x),
        }
    }

    pub fn is_odd(&self) -> bool {
        matches!(self.cancellation, Cancellation::Odd)
    }

    /// Sampled size and cancellation checks: `|K(x)| |x|^k <= C_K` and
    /// either oddness or vanishing integrals over annuli `r < |x| < R`.
    pub fn validate(&self, samples: usize, seed: u64) -> Result<()> {
        let k = self.dim();
        if k == 0 {
            return Err(invalid!("kernel dimension must be positive"));
        }
        if !(self.size_constant.is_finite() && self.size_constant > 0.0) {
            return Err(invalid!("size constant must be positive and finite"));
        }
        self.modulus.check_parameters()?;
        let mut rng = shard_rng(seed, 0);
        let mut x = vec![0.0; k];
        let mut neg = vec![0.0; k];
        for _ in 0..samples {
            sample_point(&mut rng, &mut x, 1e-3, 1e3);
            let v = self.eval(&x);
            let size = v.abs() * euclidean_norm(&x).powi(k as i32);
            if !v.is_finite() || size > self.size_constant * (1.0 + 1e-9) {
                return Err(invalid!("size condition fails at {x:?}: |K(x)||x|^k = {size}"));
            }
            if self.is_odd() {
                neg.iter_mut().zip(&x).for_each(|(n, v)| *n = -v);
                let w = self.eval(&neg);
                if (v + w).abs() > 1e-12 * v.abs().max(1e-300) {
                    return Err(invalid!("kernel declared odd but K(-x) != -K(x) at {x:?}"));
                }
            }
        }
        if let Cancellation::Numeric { tol } = self.cancellation {
            for (r, big) in [(0.1, 1.0), (1.0, 10.0), (0.5, 0.7)] {
                let i = shell_integral(self, r, big)?;
                if i.abs() > tol {
                    return Err(invalid!("cancellation fails on {r} < |x| < {big}: integral {i:e}"));
                }
            }
        }
        Ok(())
    }
}

fn sample_point<R: Rng>(rng: &mut R, x: &mut [f64], lo: f64, hi: f64) {
    loop {
        x.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
        let n = euclidean_norm(x);
        if n > 1e-12 {
            let r = (lo.ln() + rng.random::<f64>() * (hi / lo).ln()).exp();
            x.iter_mut().for_each(|v| *v *= r / n);
            return;
        }
    }
}

/// `int_(r < |x| < R) g(x) dx` for `k in {1, 2}` by Gauss–Legendre panels
/// (polar coordinates when `k = 2`).
fn annulus_integral(k: usize, r: f64, big: f64, mut g: impl FnMut(&[f64]) -> f64) -> Result<f64> {
    let gl = GaussLegendre::g16();
    let radial = 8;
    let h = (big - r) / radial as f64;
    match k {
        1 => {
            let mut acc = 0.0;
            for i in 0..radial {
                let a = r + i as f64 * h;
                acc += gl.integrate(a, a + h, |x| g(&[x]) + g(&[-x]));
            }
            Ok(acc)
        }
        2 => {
            let angular = 64;
            let dt = 2.0 * PI / angular as f64;
            let mut acc = 0.0;
            for j in 0..angular {
                let t0 = j as f64 * dt;
                acc += gl.integrate(t0, t0 + dt, |th| {
                    let (s, c) = th.sin_cos();
                    let mut inner = 0.0;
                    for i in 0..radial {
                        let a = r + i as f64 * h;
                        inner += gl.integrate(a, a + h, |rho| rho * g(&[rho * c, rho * s]));
                    }
                    inner
                });
            }
            Ok(acc)
        }
        _ => Err(invalid!("annulus integrals are implemented for k <= 2, got k = {k}")),
    }
}

fn shell_integral(kernel: &KernelSpec, r: f64, big: f64) -> Result<f64> {
    annulus_integral(kernel.dim(), r, big, |x| kernel.eval(x))
}

/// `int_(R <= |x| <= 2R) |x|^(-k) dx = |S^(k-1)| ln 2`, the factor by which
/// the pointwise smoothness bound implies the annular one.
pub fn annulus_factor(k: usize) -> f64 {
    let d = k as f64;
    let sphere = 2.0 * PI.powf(d / 2.0) / statrs::function::gamma::gamma(d / 2.0);
    sphere * LN_2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessReport {
    /// `max |K(x)| |x|^k / C_K`.
    pub size_ratio: f64,
    /// `max |K(x) - K(x+y)| |x|^k / omega(|y|/|x|)` over `|y| <= |x|/2`.
    pub pointwise_ratio: f64,
    /// `max int_(R<=|x|<=2R) |K(x) - K(x+y)| dx / omega(t)` over
    /// `|y| = Rt/2`; absent when `k > 2`.
    pub annular_ratio: Option<f64>,
    /// Constant with which a pointwise bound implies the annular one.
    pub implication_constant: f64,
    /// `annular_ratio <= implication_constant * pointwise_ratio`.
    pub implication_holds: Option<bool>,
    pub pointwise_samples: usize,
    pub annular_samples: usize,
}

fn ratio(num: f64, den: f64) -> f64 {
    if num <= 0.0 {
        0.0
    } else if den <= 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

/// Sampled verification of the size, pointwise smoothness and annular
/// smoothness conditions against the kernel's declared constants.
pub fn kernel_smoothness_check(kernel: &KernelSpec, sample_budget: usize, seed: u64) -> SmoothnessReport {
    let k = kernel.dim();
    let omega = &kernel.modulus;
    let mut rng = shard_rng(seed, 1);
    let mut x = vec![0.0; k];
    let mut y = vec![0.0; k];
    let mut xy = vec![0.0; k];
    let (mut size_ratio, mut pointwise_ratio) = (0.0f64, 0.0f64);
    for _ in 0..sample_budget {
        sample_point(&mut rng, &mut x, 1e-3, 1e3);
        let nx = euclidean_norm(&x);
        // |y|/|x| log-uniform in [1e-6, 1/2]
        sample_point(&mut rng, &mut y, 1e-6, 0.5);
        y.iter_mut().for_each(|v| *v *= nx);
        xy.iter_mut().zip(x.iter().zip(&y)).for_each(|(s, (a, b))| *s = a + b);
        let kx = kernel.eval(&x);
        let scale = nx.powi(k as i32);
        size_ratio = size_ratio.max(ratio(kx.abs() * scale, kernel.size_constant));
        let diff = (kx - kernel.eval(&xy)).abs() * scale;
        pointwise_ratio = pointwise_ratio.max(ratio(diff, omega.eval(euclidean_norm(&y) / nx)));
    }
    let implication_constant = annulus_factor(k);
    let mut annular = None;
    let mut annular_samples = 0;
    if k <= 2 {
        let mut worst: f64 = 0.0;
        for &big_r in &[1e-2, 1.0, 1e2] {
            for &t in &crate::numeric::log_space(1e-4, 0.99, 12) {
                for _ in 0..3 {
                    sample_point(&mut rng, &mut y, 1.0, 1.0);
                    let len = big_r * t / 2.0;
                    let v: Vec<f64> = y.iter().map(|c| c * len).collect();
                    let mut shifted = vec![0.0; k];
                    let integral = annulus_integral(k, big_r, 2.0 * big_r, |p| {
                        shifted.iter_mut().zip(p.iter().zip(&v)).for_each(|(s, (a, b))| *s = a + b);
                        (kernel.eval(p) - kernel.eval(&shifted)).abs()
                    })
                    .unwrap_or(f64::NAN);
                    worst = worst.max(ratio(integral, omega.eval(t)));
                    annular_samples += 1;
                }
            }
        }
        annular = Some(worst);
    }
    SmoothnessReport {
        size_ratio,
        pointwise_ratio,
        annular_ratio: annular,
        implication_constant,
        implication_holds: annular.map(|a| a <= implication_constant * pointwise_ratio.max(1e-300) * (1.0 + 1e-6) || a == 0.0),
        pointwise_samples: sample_budget,
        annular_samples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hilbert_kernel_passes() {
        let h = KernelSpec::hilbert();
        h.validate(1000, 1).unwrap();
        let rep = kernel_smoothness_check(&h, 20_000, 2);
        assert!(rep.size_ratio <= 1.0 + 1e-12);
        assert!(rep.pointwise_ratio <= 1.0 + 1e-9 && rep.pointwise_ratio > 0.5);
        assert_eq!(rep.implication_holds, Some(true));
    }

    #[test]
    fn zero_kernel_is_all_zero() {
        let rep = kernel_smoothness_check(&KernelSpec::zero(2), 500, 3);
        assert_eq!(rep.size_ratio, 0.0);
        assert_eq!(rep.pointwise_ratio, 0.0);
        assert_eq!(rep.annular_ratio, Some(0.0));
    }

    #[test]
    fn riesz_kernel_in_the_plane() {
        let r = KernelSpec::riesz(2, 0).unwrap();
        r.validate(1000, 4).unwrap();
        let rep = kernel_smoothness_check(&r, 10_000, 5);
        assert!(rep.size_ratio <= 1.0 + 1e-12);
        assert!(rep.pointwise_ratio <= 1.0);
        assert_eq!(rep.implication_holds, Some(true));
    }

    #[test]
    fn numeric_cancellation() {
        let even = KernelSpec::custom(
            1,
            "even",
            |x: &[f64]| 1.0 / x[0].abs(),
            1.0,
            ModulusOfContinuity::linear(2.0),
            Cancellation::Numeric { tol: 1e-10 },
        );
        assert!(even.validate(100, 1).is_err());
        let odd = KernelSpec::custom(
            1,
            "odd",
            |x: &[f64]| x[0].signum() / x[0].abs(),
            1.0,
            ModulusOfContinuity::linear(2.0),
            Cancellation::Numeric { tol: 1e-10 },
        );
        odd.validate(100, 1).unwrap();
    }

    #[test]
    fn annulus_factors() {
        assert!((annulus_factor(1) - 2.0 * LN_2).abs() < 1e-14);
        assert!((annulus_factor(2) - 2.0 * PI * LN_2).abs() < 1e-13);
    }

    #[test]
    fn json_shape() {
        let text = serde_json::to_string(&KernelSpec::hilbert()).unwrap();
        let back: KernelSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back.dim(), 1);
        assert!(text.starts_with(r#"{"kind":"hilbert""#));
    }
}
