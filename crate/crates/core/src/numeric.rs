//! Small numerical building blocks shared across modules: Gauss–Legendre
//! rules, compensated summation and deterministic seeding.

use std::sync::OnceLock;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the rule by Newton iteration on the Legendre polynomial.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Shared 16-point rule.
    pub fn g16() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(16))
    }

    /// Shared 8-point rule.
    pub fn g8() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(8))
    }

    /// Shared 20-point rule.
    pub fn g20() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(20))
    }

    /// Integrates a real function over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Integrates a complex function over `[a, b]`.
    pub fn integrate_c<F: FnMut(f64) -> Complex64>(&self, a: f64, b: f64, mut f: F) -> Complex64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + half * x) * *w;
        }
        acc * half
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, w * half))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let dp = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Largest phase change allowed across one 16-point panel.
pub const PHASE_STEP: f64 = 4.0;
/// Panel budget of a single oscillatory integral.
pub const PANEL_BUDGET: usize = 1 << 26;

/// An oscillatory integral with a doubling-based error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillatory {
    pub value: Complex64,
    /// `|I(step) - I(step / 2)|`.
    pub error: f64,
    pub panels: usize,
}

fn oscillatory_panels<P, S, A>(
    a: f64,
    b: f64,
    phase: &P,
    slope: &S,
    amp: &A,
    step: f64,
    used: &mut usize,
) -> Result<Complex64, String>
where
    P: Fn(f64) -> f64,
    S: Fn(f64, f64) -> f64,
    A: Fn(f64) -> f64,
{
    let turn = slope(a, b) * (b - a);
    if !turn.is_finite() {
        return Err(format!("phase slope is not finite on [{a}, {b}]"));
    }
    if turn <= step || b - a <= f64::EPSILON * a.abs().max(b.abs()) {
        *used += 1;
        if *used > PANEL_BUDGET {
            return Err(format!("oscillatory quadrature exceeded {PANEL_BUDGET} panels"));
        }
        return Ok(GaussLegendre::g16().integrate_c(a, b, |x| Complex64::from_polar(amp(x), phase(x))));
    }
    let n = ((turn / step).ceil() as usize).clamp(2, 1 << 16);
    let h = (b - a) / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let lo = a + i as f64 * h;
        let hi = if i + 1 == n { b } else { lo + h };
        acc += oscillatory_panels(lo, hi, phase, slope, amp, step, used)?;
    }
    Ok(acc)
}

/// `int_a^b amp(x) e^(i phase(x)) dx` on Gauss–Legendre panels across which
/// the phase turns by at most [`PHASE_STEP`] radians. `slope(lo, hi)` must
/// bound `|phase'|` on `[lo, hi]`; `amp` must be smooth on `[a, b]`. The
/// integral is recomputed with half the step to estimate the error.
pub fn oscillatory_integral<P, S, A>(a: f64, b: f64, phase: P, slope: S, amp: A) -> Result<Oscillatory, String>
where
    P: Fn(f64) -> f64,
    S: Fn(f64, f64) -> f64,
    A: Fn(f64) -> f64,
{
    if a >= b {
        return Ok(Oscillatory {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            panels: 0,
        });
    }
    let mut coarse_used = 0;
    let coarse = oscillatory_panels(a, b, &phase, &slope, &amp, PHASE_STEP, &mut coarse_used)?;
    let mut used = 0;
    let fine = oscillatory_panels(a, b, &phase, &slope, &amp, PHASE_STEP / 2.0, &mut used)?;
    Ok(Oscillatory {
        value: fine,
        error: (fine - coarse).norm(),
        panels: used,
    })
}

/// Neumaier compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Compensated sum of an iterator.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// SplitMix64 step, used to derive independent per-shard seeds.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic generator for shard `stream` of a run seeded with `seed`.
pub fn shard_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix_seed(seed, stream))
}

/// `n` points log-spaced between `lo` and `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > 0.0);
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oscillatory_linear_phase() {
        let lam = 1e4;
        let r = oscillatory_integral(0.0, 1.0, |x| lam * x, |_, _| lam, |_| 1.0).unwrap();
        let exact = (Complex64::from_polar(1.0, lam) - 1.0) / Complex64::new(0.0, lam);
        assert!((r.value - exact).norm() < 1e-13);
        assert!(r.error < 1e-12);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 8, 16, 20] {
            let rule = GaussLegendre::new(n);
            let wsum: f64 = rule.weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-14, "n={n} weights sum {wsum}");
            // degree 2n-1 exact
            let deg = 2 * n - 1;
            let got = rule.integrate(0.0, 1.0, |x| x.powi(deg as i32));
            assert!((got - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(xs), 2.0);
    }

    #[test]
    fn log_space_endpoints() {
        let v = log_space(1e-3, 1e3, 7);
        assert!((v[0] - 1e-3).abs() < 1e-18);
        assert!((v[6] - 1e3).abs() < 1e-9);
        assert!((v[3] - 1.0).abs() < 1e-12);
    }
}
