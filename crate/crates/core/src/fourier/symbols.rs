use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Which Poisson semigroup a symbol belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoissonKind {
    /// `e^(-2 pi t |xi|)` on `R^d`.
    Continuous,
    /// `e^(-2 pi t |xi|_sin)` on the torus.
    Discrete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymbolFlavor {
    PoissonContinuous,
    PoissonDiscrete,
    LittlewoodPaley,
    Cube,
    LqBall,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrequencyDomain {
    Euclidean,
    /// `[-1/2, 1/2)^d`.
    Torus,
}

pub fn euclidean_norm(xi: &[f64]) -> f64 {
    xi.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `(sum_j sin^2(pi xi_j))^(1/2)`.
pub fn sin_norm(xi: &[f64]) -> f64 {
    xi.iter().map(|x| (PI * x).sin().powi(2)).sum::<f64>().sqrt()
}

fn check_torus(xi: &[f64]) -> Result<()> {
    if xi.iter().all(|x| (-0.5..0.5).contains(x)) {
        Ok(())
    } else {
        Err(invalid!("discrete symbols need frequencies in [-1/2, 1/2)^d"))
    }
}

/// Poisson semigroup symbol at time `t`.
pub fn poisson_symbol(t: f64, xi: &[f64], kind: PoissonKind) -> Result<f64> {
    if t.is_nan() || t <= 0.0 {
        return Err(invalid!("Poisson time must be positive, got {t}"));
    }
    Ok(match kind {
        PoissonKind::Continuous => (-2.0 * PI * t * euclidean_norm(xi)).exp(),
        PoissonKind::Discrete => {
            check_torus(xi)?;
            (-2.0 * PI * t * sin_norm(xi)).exp()
        }
    })
}

/// Littlewood–Paley piece `p_(2^k)(xi) - p_(2^(k+1))(xi)`.
pub fn littlewood_paley_symbol(k: i32, xi: &[f64], kind: PoissonKind) -> Result<f64> {
    let a = poisson_symbol(2f64.powi(k), xi, kind)?;
    let b = poisson_symbol(2f64.powi(k + 1), xi, kind)?;
    Ok(a - b)
}

/// `min(2^k |xi|, (2^k |xi|)^-1)`.
pub fn dyadic_envelope(k: i32, xi: &[f64]) -> f64 {
    let s = 2f64.powi(k) * euclidean_norm(xi);
    if s == 0.0 {
        0.0
    } else {
        s.min(1.0 / s)
    }
}

/// `sin(x) / x` with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `sin((2N+1) pi x) / ((2N+1) sin(pi x))`, equal to 1 at `x = 0`.
pub fn dirichlet_ratio(n: u32, x: f64) -> f64 {
    let m = (2 * n + 1) as f64;
    let s = (PI * x).sin();
    if s.abs() < 1e-12 {
        // (2N+1) is odd, so the limit at every integer is 1
        return 1.0;
    }
    (m * PI * x).sin() / (m * s)
}

type Evaluator = Arc<dyn Fn(f64, &[f64]) -> Complex64 + Send + Sync>;

/// A parameterised family of Fourier multipliers `(param, xi) -> value`.
///
/// The parameter is a time `t` for dilation families and an integer scale `k`
/// (passed as `f64`) for dyadic families.
#[derive(Clone)]
pub struct SymbolFamily {
    label: String,
    flavor: SymbolFlavor,
    domain: FrequencyDomain,
    dims: Option<usize>,
    value_at_zero: Option<Complex64>,
    eval: Evaluator,
}

impl fmt::Debug for SymbolFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymbolFamily")
            .field("label", &self.label)
            .field("flavor", &self.flavor)
            .field("domain", &self.domain)
            .field("dims", &self.dims)
            .field("value_at_zero", &self.value_at_zero)
            .finish()
    }
}

impl SymbolFamily {
    pub fn new<F>(
        label: impl Into<String>,
        flavor: SymbolFlavor,
        domain: FrequencyDomain,
        dims: Option<usize>,
        value_at_zero: Option<Complex64>,
        eval: F,
    ) -> Self
    where
        F: Fn(f64, &[f64]) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            flavor,
            domain,
            dims,
            value_at_zero,
            eval: Arc::new(eval),
        }
    }

    /// User-supplied family on `R^d`.
    pub fn custom<F>(label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(f64, &[f64]) -> Complex64 + Send + Sync + 'static,
    {
        Self::new(label, SymbolFlavor::Custom, FrequencyDomain::Euclidean, None, None, eval)
    }

    /// `t -> p_t`.
    pub fn poisson(kind: PoissonKind) -> Self {
        let (flavor, domain) = match kind {
            PoissonKind::Continuous => (SymbolFlavor::PoissonContinuous, FrequencyDomain::Euclidean),
            PoissonKind::Discrete => (SymbolFlavor::PoissonDiscrete, FrequencyDomain::Torus),
        };
        Self::new("poisson", flavor, domain, None, Some(Complex64::new(1.0, 0.0)), move |t, xi| {
            let norm = match kind {
                PoissonKind::Continuous => euclidean_norm(xi),
                PoissonKind::Discrete => sin_norm(xi),
            };
            Complex64::new((-2.0 * PI * t * norm).exp(), 0.0)
        })
    }

    /// `k -> p_(2^k) - p_(2^(k+1))`.
    pub fn littlewood_paley(kind: PoissonKind) -> Self {
        let domain = match kind {
            PoissonKind::Continuous => FrequencyDomain::Euclidean,
            PoissonKind::Discrete => FrequencyDomain::Torus,
        };
        Self::new(
            "littlewood-paley",
            SymbolFlavor::LittlewoodPaley,
            domain,
            None,
            Some(Complex64::new(0.0, 0.0)),
            move |k, xi| {
                let norm = match kind {
                    PoissonKind::Continuous => euclidean_norm(xi),
                    PoissonKind::Discrete => sin_norm(xi),
                };
                let a = (-2.0 * PI * 2f64.powf(k) * norm).exp();
                let b = (-2.0 * PI * 2f64.powf(k + 1.0) * norm).exp();
                Complex64::new(a - b, 0.0)
            },
        )
    }

    /// `k -> min(2^k |xi|, (2^k |xi|)^-1)`.
    pub fn dyadic_envelope() -> Self {
        Self::new(
            "envelope",
            SymbolFlavor::Custom,
            FrequencyDomain::Euclidean,
            None,
            Some(Complex64::new(0.0, 0.0)),
            |k, xi| {
                let s = 2f64.powf(k) * euclidean_norm(xi);
                Complex64::new(if s == 0.0 { 0.0 } else { s.min(1.0 / s) }, 0.0)
            },
        )
    }

    /// `t -> prod_j sin(2 pi t xi_j) / (2 pi t xi_j)`, the average over
    /// `t [-1, 1]^d`.
    pub fn continuous_cube() -> Self {
        Self::new(
            "cube",
            SymbolFlavor::Cube,
            FrequencyDomain::Euclidean,
            None,
            Some(Complex64::new(1.0, 0.0)),
            |t, xi| Complex64::new(xi.iter().map(|&x| sinc(2.0 * PI * t * x)).product(), 0.0),
        )
    }

    /// `N -> prod_j sin((2N+1) pi xi_j) / ((2N+1) sin(pi xi_j))`, the average
    /// over `[-N, N]^d` on the integer lattice.
    pub fn discrete_cube() -> Self {
        Self::new(
            "discrete-cube",
            SymbolFlavor::Cube,
            FrequencyDomain::Torus,
            None,
            Some(Complex64::new(1.0, 0.0)),
            |n, xi| {
                let n = n.round().max(0.0) as u32;
                Complex64::new(xi.iter().map(|&x| dirichlet_ratio(n, x)).product(), 0.0)
            },
        )
    }

    pub fn with_dims(mut self, dims: usize) -> Self {
        self.dims = Some(dims);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn flavor(&self) -> SymbolFlavor {
        self.flavor
    }

    pub fn domain(&self) -> FrequencyDomain {
        self.domain
    }

    pub fn dims(&self) -> Option<usize> {
        self.dims
    }

    pub fn value_at_zero(&self) -> Option<Complex64> {
        self.value_at_zero
    }

    pub fn eval(&self, param: f64, xi: &[f64]) -> Complex64 {
        (self.eval)(param, xi)
    }
}
