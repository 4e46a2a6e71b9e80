use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::amplitude::{Amplitude, AmplitudeSpec, PiecewiseLinear};
use super::phase::PhaseSpec;
use crate::error::{invalid, Error, Result};
use crate::numeric::{oscillatory_integral, CompensatedSum, GaussLegendre, PHASE_STEP};

/// Tolerance on the quadrature error estimate, relative to `max(1, int |psi|)`.
pub const QUADRATURE_TOL: f64 = 1e-9;
/// Interior points of the grid on which the window term is minimised.
pub const WINDOW_GRID: usize = 128;
/// Node budget of the two-variable tensor quadrature.
const TENSOR_BUDGET: usize = 1 << 28;
const SHIFT_RADII: usize = 16;
const SHIFT_DIRECTIONS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vdc1dReport {
    pub lhs: f64,
    pub rhs_window: f64,
    pub rhs_smoothness: f64,
    pub l1_norm: f64,
    pub quadrature_error: f64,
}

impl Vdc1dReport {
    /// `lhs / (rhs_window + rhs_smoothness)`, zero when both sides vanish.
    pub fn ratio(&self) -> f64 {
        ratio(self.lhs, self.rhs_window + self.rhs_smoothness)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VdcMultiReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `sum_(|alpha| >= 1) R^|alpha| |coef_alpha|`.
    pub scale: f64,
    pub degree: u32,
    pub l1_norm: f64,
    pub quadrature_error: f64,
    /// Shift attaining the supremum on the grid.
    pub worst_shift: Vec<f64>,
}

impl VdcMultiReport {
    pub fn ratio(&self) -> f64 {
        ratio(self.lhs, self.rhs)
    }
}

fn ratio(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a / b
    }
}

/// `int_lo^hi psi e^(i phase)` for a one-variable phase, split at the knots
/// of `psi`.
fn oscillatory_1d(phase: &PhaseSpec, f: &PiecewiseLinear, lo: f64, hi: f64) -> Result<(Complex64, f64)> {
    let mut cuts: Vec<f64> = f.knots().iter().copied().filter(|&k| k > lo && k < hi).collect();
    let Some((slo, shi)) = f.support() else {
        return Ok((Complex64::new(0.0, 0.0), 0.0));
    };
    let (lo, hi) = (lo.max(slo), hi.min(shi));
    if lo >= hi {
        return Ok((Complex64::new(0.0, 0.0), 0.0));
    }
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = 0.5 * (a + b);
        // the amplitude is linear inside the cell; use its interior extension
        let (fa, fb) = (f.eval(a), f.eval(mid));
        let slope_f = (fb - fa) / (mid - a);
        let amp = |x: f64| fa + slope_f * (x - a);
        let part = oscillatory_integral(
            a,
            b,
            |x| phase.eval(&[x]),
            |l, h| phase.slope_bound(0, &[(l, h)]),
            amp,
        )
        .map_err(Error::NumericFailure)?;
        value += part.value;
        error += part.error;
    }
    Ok((value, error))
}

fn cells(a: f64, b: f64, slope: f64, step: f64) -> usize {
    ((slope * (b - a) / step).ceil() as usize).max(1)
}

/// Number of nodes [`weighted_nodes`] would produce, 16 per cell.
fn node_count(f: &PiecewiseLinear, slope: f64, step: f64) -> usize {
    f.knots()
        .windows(2)
        .map(|w| cells(w[0], w[1], slope, step).saturating_mul(16))
        .fold(0, usize::saturating_add)
}

/// Nodes `(x, w f(x))` on cells across which the phase turns by at most
/// `step` at slope `slope`.
fn weighted_nodes(f: &PiecewiseLinear, slope: f64, step: f64) -> Vec<(f64, f64)> {
    let gl = GaussLegendre::g16();
    let mut out = Vec::new();
    for w in f.knots().windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = 0.5 * (a + b);
        let (fa, fm) = (f.eval(a), f.eval(mid));
        let n = cells(a, b, slope, step);
        let h = (b - a) / n as f64;
        for i in 0..n {
            let lo = a + i as f64 * h;
            for (x, wt) in gl.mapped(lo, lo + h) {
                out.push((x, wt * (fa + (fm - fa) * (x - a) / (mid - a))));
            }
        }
    }
    out
}

fn tensor_2d(phase: &PhaseSpec, amp: &Amplitude, step: f64) -> Result<Complex64> {
    let bbox = amp.support().expect("nonzero amplitude");
    let fx = &amp.factors()[0];
    let fy = &amp.factors()[1];
    let (sx, sy) = (phase.slope_bound(0, &bbox), phase.slope_bound(1, &bbox));
    let (cx, cy) = (node_count(fx, sx, step), node_count(fy, sy, step));
    if cx.saturating_mul(cy) > TENSOR_BUDGET {
        return Err(Error::NumericFailure(format!("tensor quadrature needs {cx} x {cy} nodes")));
    }
    let nx = weighted_nodes(fx, sx, step);
    let ny = weighted_nodes(fy, sy, step);
    let (mut re, mut im) = (CompensatedSum::new(), CompensatedSum::new());
    for &(y, wy) in &ny {
        let mut row = Complex64::new(0.0, 0.0);
        for &(x, wx) in &nx {
            row += Complex64::from_polar(wx, phase.eval(&[x, y]));
        }
        re.add(wy * row.re);
        im.add(wy * row.im);
    }
    Ok(Complex64::new(re.value(), im.value()))
}

fn check_modulus(lhs: f64, l1: f64) -> Result<()> {
    if lhs > l1 * (1.0 + 1e-9) + 1e-15 {
        return Err(Error::NumericFailure(format!(
            "oscillatory integral {lhs} exceeds the amplitude mass {l1}"
        )));
    }
    Ok(())
}

fn check_error(error: f64, l1: f64) -> Result<()> {
    if !(error <= QUADRATURE_TOL * l1.max(1.0)) {
        return Err(Error::NumericFailure(format!(
            "oscillatory quadrature error estimate {error:e} above tolerance"
        )));
    }
    Ok(())
}

/// One-variable rough-amplitude van der Corput quantities for a phase whose
/// `k`-th derivative is `lambda`:
///
/// * `lhs = |int_a^b e^(i phase) psi|`,
/// * `rhs_window = inf_(x in [a, b]) int_(x - d)^(x + d) |psi|`,
/// * `rhs_smoothness = d^-1 int_(-d)^d int_a^b |psi(x) - psi(x - y)| dx dy`,
///
/// with `d = lambda^(-1/k)`. The infimum runs over an even grid of
/// [`WINDOW_GRID`] interior points plus the endpoints.
pub fn vdc_1d(phase: &PhaseSpec, psi: &AmplitudeSpec) -> Result<Vdc1dReport> {
    phase.validate()?;
    let PhaseSpec::Monomial { lambda, order, a, b, .. } = *phase else {
        return Err(invalid!("the one-variable bound needs a monomial phase"));
    };
    if psi.dim() != 1 {
        return Err(invalid!("amplitude must be a function of one variable"));
    }
    let amp = Amplitude::from_spec(psi)?;
    let f = &amp.factors()[0];
    let l1 = f.support().map_or(0.0, |(lo, hi)| f.abs_integral(lo.max(a), hi.min(b)).max(0.0));
    if amp.is_zero() {
        return Ok(Vdc1dReport {
            lhs: 0.0,
            rhs_window: 0.0,
            rhs_smoothness: 0.0,
            l1_norm: 0.0,
            quadrature_error: 0.0,
        });
    }
    let (value, error) = oscillatory_1d(phase, f, a, b)?;
    let lhs = value.norm();
    check_error(error, l1)?;
    check_modulus(lhs, l1)?;

    let d = lambda.powf(-1.0 / f64::from(order));
    let rhs_window = (0..=WINDOW_GRID + 1)
        .map(|i| {
            let x = a + (b - a) * i as f64 / (WINDOW_GRID + 1) as f64;
            f.abs_integral(x - d, x + d)
        })
        .fold(f64::INFINITY, f64::min);

    // the shift difference is smooth in y between coincidences of knots
    let mut ends: Vec<f64> = f.knots().iter().copied().chain([a, b]).collect();
    ends.sort_by(f64::total_cmp);
    ends.dedup();
    let mut cuts: Vec<f64> = ends
        .iter()
        .flat_map(|&u| f.knots().iter().map(move |&k| u - k))
        .filter(|y| y.abs() < d)
        .chain([-d, 0.0, d])
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let gl = GaussLegendre::g20();
    let inner: f64 = cuts
        .windows(2)
        .map(|w| gl.integrate(w[0], w[1], |y| f.shift_difference(y, a, b)))
        .collect::<CompensatedSum>()
        .value();
    Ok(Vdc1dReport {
        lhs,
        rhs_window,
        rhs_smoothness: inner / d,
        l1_norm: l1,
        quadrature_error: error,
    })
}

/// Several-variable bound for a polynomial phase and an amplitude supported
/// in the ball of radius `r / 2`:
///
/// * `lhs = |int e^(i P) psi|`,
/// * `rhs = sup_(|v| <= r L^(-1/d)) int |psi(x) - psi(x - v)| dx`,
///
/// with `L = sum_(|alpha| >= 1) r^|alpha| |coef_alpha|` and `d` the degree.
/// The supremum runs over a polar grid of shifts. At most two variables.
pub fn vdc_multidim(phase: &PhaseSpec, psi: &AmplitudeSpec, r: f64) -> Result<VdcMultiReport> {
    phase.validate()?;
    if !matches!(phase, PhaseSpec::Polynomial { .. }) {
        return Err(invalid!("the several-variable bound needs a polynomial phase"));
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(invalid!("support scale must be positive, got {r}"));
    }
    let k = phase.vars();
    if k > 2 {
        return Err(invalid!("tensor quadrature is limited to two variables, got {k}"));
    }
    if psi.dim() != k {
        return Err(invalid!("amplitude has {} variables, phase has {k}", psi.dim()));
    }
    let scale = phase.scale_size(r);
    let degree = phase.degree();
    if !(scale > 0.0) || degree == 0 {
        return Err(invalid!("phase has no non-constant part"));
    }
    let amp = Amplitude::from_spec(psi)?;
    let Some(bbox) = amp.support() else {
        return Ok(VdcMultiReport {
            lhs: 0.0,
            rhs: 0.0,
            scale,
            degree,
            l1_norm: 0.0,
            quadrature_error: 0.0,
            worst_shift: vec![0.0; k],
        });
    };
    let far = bbox
        .iter()
        .map(|&(lo, hi)| lo.abs().max(hi.abs()).powi(2))
        .sum::<f64>()
        .sqrt();
    if far > 0.5 * r * (1.0 + 1e-12) {
        return Err(invalid!("amplitude support reaches {far}, beyond the ball of radius {}", r / 2.0));
    }
    let l1 = amp.l1_norm();
    let (value, error) = if k == 1 {
        let f = &amp.factors()[0];
        let (lo, hi) = bbox[0];
        oscillatory_1d(phase, f, lo, hi)?
    } else {
        let coarse = tensor_2d(phase, &amp, PHASE_STEP)?;
        let fine = tensor_2d(phase, &amp, PHASE_STEP / 2.0)?;
        (fine, (fine - coarse).norm())
    };
    let lhs = value.norm();
    check_error(error, l1)?;
    check_modulus(lhs, l1)?;

    let rho = r * scale.powf(-1.0 / f64::from(degree));
    let mut best = (0.0, vec![0.0; k]);
    let directions: Vec<Vec<f64>> = if k == 1 {
        vec![vec![1.0], vec![-1.0]]
    } else {
        (0..SHIFT_DIRECTIONS)
            .map(|i| {
                let th = 2.0 * PI * i as f64 / SHIFT_DIRECTIONS as f64;
                vec![th.cos(), th.sin()]
            })
            .collect()
    };
    for u in &directions {
        for j in 1..=SHIFT_RADII {
            let s = rho * j as f64 / SHIFT_RADII as f64;
            let v: Vec<f64> = u.iter().map(|c| c * s).collect();
            let dv = amp.shift_difference(&v);
            if dv > best.0 {
                best = (dv, v);
            }
        }
    }
    Ok(VdcMultiReport {
        lhs,
        rhs: best.0,
        scale,
        degree,
        l1_norm: l1,
        quadrature_error: error,
        worst_shift: best.1,
    })
}
