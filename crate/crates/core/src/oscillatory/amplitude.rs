use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numeric::{CompensatedSum, GaussLegendre};

/// A compactly supported function on the line, linear between knots with
/// possible jumps at the knots and zero outside `[knots[0], knots[n]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    knots: Vec<f64>,
    /// `(value just right of knots[i], value just left of knots[i+1])`.
    segments: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    pub fn new(knots: Vec<f64>, segments: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() && segments.is_empty() {
            return Ok(Self::zero());
        }
        if knots.len() != segments.len() + 1 {
            return Err(invalid!("{} knots need {} segments", knots.len(), knots.len().saturating_sub(1)));
        }
        if knots.windows(2).any(|w| !(w[0] < w[1])) || knots.iter().any(|k| !k.is_finite()) {
            return Err(invalid!("knots must be finite and strictly increasing"));
        }
        if segments.iter().any(|(a, b)| !(a.is_finite() && b.is_finite())) {
            return Err(invalid!("amplitude values must be finite"));
        }
        Ok(Self { knots, segments })
    }

    pub fn zero() -> Self {
        Self {
            knots: Vec::new(),
            segments: Vec::new(),
        }
    }

    pub fn indicator(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo, hi], vec![(1.0, 1.0)])
    }

    pub fn hat(center: f64, half_width: f64) -> Result<Self> {
        Self::new(
            vec![center - half_width, center, center + half_width],
            vec![(0.0, 1.0), (1.0, 0.0)],
        )
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn is_zero(&self) -> bool {
        self.segments.iter().all(|&(a, b)| a == 0.0 && b == 0.0)
    }

    /// `[lo, hi]` outside which the function vanishes.
    pub fn support(&self) -> Option<(f64, f64)> {
        Some((*self.knots.first()?, *self.knots.last()?))
    }

    fn segment_at(&self, x: f64) -> Option<usize> {
        let (lo, hi) = self.support()?;
        if x < lo || x >= hi {
            return None;
        }
        Some(self.knots.partition_point(|&k| k <= x) - 1)
    }

    fn interp(&self, i: usize, x: f64) -> f64 {
        let (a, b) = (self.knots[i], self.knots[i + 1]);
        let (va, vb) = self.segments[i];
        va + (vb - va) * (x - a) / (b - a)
    }

    /// Value at `x`, right-continuous at the knots.
    pub fn eval(&self, x: f64) -> f64 {
        self.segment_at(x).map_or(0.0, |i| self.interp(i, x))
    }

    /// Limit from the right.
    fn right(&self, x: f64) -> f64 {
        self.eval(x)
    }

    /// Limit from the left.
    fn left(&self, x: f64) -> f64 {
        let Some((lo, hi)) = self.support() else { return 0.0 };
        if x <= lo || x > hi {
            return 0.0;
        }
        let i = self.knots.partition_point(|&k| k < x) - 1;
        self.interp(i, x)
    }

    /// `x -> self(x / s)`.
    pub fn dilate(&self, s: f64) -> Self {
        Self {
            knots: self.knots.iter().map(|k| k * s).collect(),
            segments: self.segments.clone(),
        }
    }

    /// `int_lo^hi |f|`, exact.
    pub fn abs_integral(&self, lo: f64, hi: f64) -> f64 {
        abs_linear_integral(&self.cells(lo, hi, &[]), |x| (self.right(x), 0.0), |x| (self.left(x), 0.0))
    }

    /// `int_lo^hi f`, exact.
    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        let cells = self.cells(lo, hi, &[]);
        cells
            .windows(2)
            .map(|w| 0.5 * (w[1] - w[0]) * (self.right(w[0]) + self.left(w[1])))
            .collect::<CompensatedSum>()
            .value()
    }

    /// `int_lo^hi |f(x) - f(x - y)| dx`, exact.
    pub fn shift_difference(&self, y: f64, lo: f64, hi: f64) -> f64 {
        let shifted: Vec<f64> = self.knots.iter().map(|k| k + y).collect();
        abs_linear_integral(
            &self.cells(lo, hi, &shifted),
            |x| (self.right(x), self.right(x - y)),
            |x| (self.left(x), self.left(x - y)),
        )
    }

    /// Knots of the function and `extra`, clipped to `[lo, hi]`, with the
    /// endpoints.
    fn cells(&self, lo: f64, hi: f64, extra: &[f64]) -> Vec<f64> {
        let mut c: Vec<f64> = self
            .knots
            .iter()
            .chain(extra)
            .copied()
            .filter(|&k| k > lo && k < hi)
            .collect();
        c.push(lo);
        c.push(hi);
        c.sort_by(f64::total_cmp);
        c.dedup();
        c
    }
}

/// `int |g|` over cells on which `g = f1 - f2` is linear, given right limits
/// at cell starts and left limits at cell ends.
fn abs_linear_integral(cells: &[f64], start: impl Fn(f64) -> (f64, f64), end: impl Fn(f64) -> (f64, f64)) -> f64 {
    let mut acc = CompensatedSum::new();
    for w in cells.windows(2) {
        let h = w[1] - w[0];
        if h <= 0.0 {
            continue;
        }
        let (a1, a2) = start(w[0]);
        let (b1, b2) = end(w[1]);
        let (g0, g1) = (a1 - a2, b1 - b2);
        if g0 * g1 >= 0.0 {
            acc.add(0.5 * h * (g0.abs() + g1.abs()));
        } else {
            acc.add(0.5 * h * (g0 * g0 + g1 * g1) / (g0.abs() + g1.abs()));
        }
    }
    acc.value()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AmplitudeSpec {
    /// Indicator of the box `prod [lower_i, upper_i]`.
    Indicator { lower: Vec<f64>, upper: Vec<f64> },
    /// Tensor product of unit-height hats.
    Hat { center: Vec<f64>, half_width: Vec<f64> },
    /// `values[i]` on `[breaks[i], breaks[i+1])`, on the line.
    StepTable { breaks: Vec<f64>, values: Vec<f64> },
    /// Linear interpolation of equally spaced samples on `[lower, upper]`,
    /// on the line.
    Sampled { lower: f64, upper: f64, values: Vec<f64> },
    Zero { dim: usize },
}

impl AmplitudeSpec {
    pub fn indicator_1d(lo: f64, hi: f64) -> Self {
        Self::Indicator {
            lower: vec![lo],
            upper: vec![hi],
        }
    }

    pub fn hat_1d(center: f64, half_width: f64) -> Self {
        Self::Hat {
            center: vec![center],
            half_width: vec![half_width],
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Indicator { lower, .. } => lower.len(),
            Self::Hat { center, .. } => center.len(),
            Self::StepTable { .. } | Self::Sampled { .. } => 1,
            Self::Zero { dim } => *dim,
        }
    }

    /// The tensor factors, one per coordinate.
    pub fn factors(&self) -> Result<Vec<PiecewiseLinear>> {
        match self {
            Self::Indicator { lower, upper } => {
                if lower.len() != upper.len() || lower.is_empty() {
                    return Err(invalid!("indicator box needs matching nonempty corners"));
                }
                lower
                    .iter()
                    .zip(upper)
                    .map(|(&l, &u)| PiecewiseLinear::indicator(l, u))
                    .collect()
            }
            Self::Hat { center, half_width } => {
                if center.len() != half_width.len() || center.is_empty() {
                    return Err(invalid!("hat needs one half-width per centre coordinate"));
                }
                center
                    .iter()
                    .zip(half_width)
                    .map(|(&c, &w)| {
                        if !(w > 0.0) {
                            return Err(invalid!("hat half-width must be positive"));
                        }
                        PiecewiseLinear::hat(c, w)
                    })
                    .collect()
            }
            Self::StepTable { breaks, values } => {
                if breaks.len() != values.len() + 1 {
                    return Err(invalid!("step table needs one more break than values"));
                }
                Ok(vec![PiecewiseLinear::new(
                    breaks.clone(),
                    values.iter().map(|&v| (v, v)).collect(),
                )?])
            }
            Self::Sampled { lower, upper, values } => {
                if values.len() < 2 || !(lower < upper) {
                    return Err(invalid!("sampled amplitude needs at least two samples on a proper interval"));
                }
                let n = values.len() - 1;
                let knots = (0..=n).map(|i| lower + (upper - lower) * i as f64 / n as f64).collect();
                let segs = values.windows(2).map(|w| (w[0], w[1])).collect();
                Ok(vec![PiecewiseLinear::new(knots, segs)?])
            }
            Self::Zero { dim } => {
                if *dim == 0 {
                    return Err(invalid!("amplitude dimension must be positive"));
                }
                Ok(vec![PiecewiseLinear::zero(); *dim])
            }
        }
    }
}

/// A tensor-product amplitude `psi(x) = prod_i f_i(x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Amplitude {
    factors: Vec<PiecewiseLinear>,
}

impl Amplitude {
    pub fn from_spec(spec: &AmplitudeSpec) -> Result<Self> {
        Ok(Self {
            factors: spec.factors()?,
        })
    }

    pub fn from_factors(factors: Vec<PiecewiseLinear>) -> Self {
        Self { factors }
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[PiecewiseLinear] {
        &self.factors
    }

    pub fn is_zero(&self) -> bool {
        self.factors.iter().any(PiecewiseLinear::is_zero)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.factors.iter().zip(x).map(|(f, &v)| f.eval(v)).product()
    }

    /// Support box, `None` for the zero function.
    pub fn support(&self) -> Option<Vec<(f64, f64)>> {
        if self.is_zero() {
            return None;
        }
        self.factors.iter().map(PiecewiseLinear::support).collect()
    }

    /// `x -> psi(x / s)`.
    pub fn dilate(&self, s: f64) -> Self {
        Self {
            factors: self.factors.iter().map(|f| f.dilate(s)).collect(),
        }
    }

    /// `int |psi|`.
    pub fn l1_norm(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        self.factors
            .iter()
            .map(|f| {
                let (lo, hi) = f.support().expect("nonzero factor");
                f.abs_integral(lo, hi)
            })
            .product()
    }

    /// `int_(R^k) |psi(x) - psi(x - v)| dx`; exact on the line and for
    /// piecewise-constant factors, Gauss–Legendre on sub-cells otherwise.
    pub fn shift_difference(&self, v: &[f64]) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        if self.factors.len() == 1 {
            let f = &self.factors[0];
            let (lo, hi) = f.support().expect("nonzero factor");
            return f.shift_difference(v[0], lo.min(lo + v[0]), hi.max(hi + v[0]));
        }
        // cells per axis from the knots of f_i and f_i(. - v_i)
        let axes: Vec<Vec<f64>> = self
            .factors
            .iter()
            .zip(v)
            .map(|(f, &s)| {
                let mut c: Vec<f64> = f.knots().iter().flat_map(|&k| [k, k + s]).collect();
                c.sort_by(f64::total_cmp);
                c.dedup();
                c
            })
            .collect();
        let constant = self
            .factors
            .iter()
            .all(|f| f.segments.iter().all(|&(a, b)| a == b));
        let (rule, split) = if constant {
            (GaussLegendre::new(1), 1)
        } else {
            (GaussLegendre::g8().clone(), 4)
        };
        let mut cells_per_axis: Vec<Vec<(f64, f64)>> = Vec::new();
        for c in &axes {
            let mut nodes = Vec::new();
            for w in c.windows(2) {
                let h = (w[1] - w[0]) / split as f64;
                for s in 0..split {
                    let lo = w[0] + s as f64 * h;
                    nodes.extend(rule.mapped(lo, lo + h));
                }
            }
            cells_per_axis.push(nodes);
        }
        let k = self.factors.len();
        // tensor sum over node products; values of each factor cached per axis
        let vals: Vec<Vec<(f64, f64, f64)>> = cells_per_axis
            .iter()
            .enumerate()
            .map(|(i, nodes)| {
                nodes
                    .iter()
                    .map(|&(x, w)| (w, self.factors[i].eval(x), self.factors[i].eval(x - v[i])))
                    .collect()
            })
            .collect();
        let mut idx = vec![0usize; k];
        let mut acc = CompensatedSum::new();
        'outer: loop {
            let (mut w, mut a, mut b) = (1.0, 1.0, 1.0);
            for (i, &j) in idx.iter().enumerate() {
                let (wi, ai, bi) = vals[i][j];
                w *= wi;
                a *= ai;
                b *= bi;
            }
            acc.add(w * (a - b).abs());
            for i in 0..k {
                idx[i] += 1;
                if idx[i] < vals[i].len() {
                    continue 'outer;
                }
                idx[i] = 0;
            }
            break;
        }
        acc.value()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_integrals() {
        let f = PiecewiseLinear::indicator(0.0, 1.0).unwrap();
        assert_eq!(f.abs_integral(-0.1, 0.1), 0.1);
        assert!((f.shift_difference(0.3, 0.0, 1.0) - 0.3).abs() < 1e-15);
        assert!((f.shift_difference(-0.3, -5.0, 5.0) - 0.6).abs() < 1e-15);
        assert!((f.shift_difference(2.0, -5.0, 5.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn hat_integrals() {
        let f = PiecewiseLinear::hat(0.0, 1.0).unwrap();
        assert!((f.abs_integral(-1.0, 1.0) - 1.0).abs() < 1e-15);
        assert!((f.integral(0.0, 0.5) - 0.375).abs() < 1e-15);
        // int |hat(x) - hat(x - y)| dx = 2y - y^2/2 ... checked by brute force
        for y in [0.1, 0.5, 1.3, 2.5] {
            let exact = f.shift_difference(y, -4.0, 4.0);
            let n = 400_000;
            let h = 8.0 / n as f64;
            let brute: f64 = (0..n)
                .map(|i| {
                    let x = -4.0 + (i as f64 + 0.5) * h;
                    (f.eval(x) - f.eval(x - y)).abs() * h
                })
                .sum();
            assert!((exact - brute).abs() < 1e-8, "{y} {exact} {brute}");
        }
    }

    #[test]
    fn signed_samples() {
        let a = Amplitude::from_spec(&AmplitudeSpec::Sampled {
            lower: 0.0,
            upper: 2.0,
            values: vec![1.0, -1.0, 1.0],
        })
        .unwrap();
        // |1 - 2x| on [0,1] integrates to 1/2, twice
        assert!((a.l1_norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn box_shift_difference() {
        let a = Amplitude::from_spec(&AmplitudeSpec::Indicator {
            lower: vec![0.0, 0.0],
            upper: vec![1.0, 2.0],
        })
        .unwrap();
        // |A delta (A + v)| = 2 (|A| - overlap)
        let v = [0.25, 0.5];
        let overlap = 0.75 * 1.5;
        assert!((a.shift_difference(&v) - 2.0 * (2.0 - overlap)).abs() < 1e-14);
        assert_eq!(a.l1_norm(), 2.0);
    }

    #[test]
    fn tensor_hat_shift_difference() {
        let a = Amplitude::from_spec(&AmplitudeSpec::Hat {
            center: vec![0.0, 0.0],
            half_width: vec![1.0, 1.0],
        })
        .unwrap();
        let v = [0.3, -0.2];
        let n = 1000;
        let h = 4.0 / n as f64;
        let mut brute = 0.0;
        for i in 0..n {
            for j in 0..n {
                let x = [-2.0 + (i as f64 + 0.5) * h, -2.0 + (j as f64 + 0.5) * h];
                let y = [x[0] - v[0], x[1] - v[1]];
                brute += (a.eval(&x) - a.eval(&y)).abs() * h * h;
            }
        }
        assert!((a.shift_difference(&v) - brute).abs() < 1e-4);
    }

    #[test]
    fn zero_amplitude() {
        let a = Amplitude::from_spec(&AmplitudeSpec::Zero { dim: 2 }).unwrap();
        assert!(a.is_zero());
        assert_eq!(a.l1_norm(), 0.0);
        assert_eq!(a.shift_difference(&[1.0, 1.0]), 0.0);
    }
}
