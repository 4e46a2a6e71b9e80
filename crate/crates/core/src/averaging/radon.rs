use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::body::ConvexBodySpec;
use super::kernel::KernelSpec;
use crate::error::{invalid, Error, Result};
use crate::fourier::{increment_coords, LatticeField};
use crate::numeric::{oscillatory_integral, GaussLegendre, Oscillatory};

/// The monomial map `y -> (y^gamma)_(gamma in Gamma)` from `R^k` to
/// `R^|Gamma|`, with `Gamma` kept in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawMap", into = "RawMap")]
pub struct CanonicalMapSpec {
    source_dim: usize,
    gamma: Vec<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMap {
    source_dim: usize,
    gamma: Vec<Vec<u32>>,
}

impl TryFrom<RawMap> for CanonicalMapSpec {
    type Error = Error;
    fn try_from(raw: RawMap) -> Result<Self> {
        Self::new(raw.source_dim, raw.gamma)
    }
}

impl From<CanonicalMapSpec> for RawMap {
    fn from(m: CanonicalMapSpec) -> Self {
        Self {
            source_dim: m.source_dim,
            gamma: m.gamma,
        }
    }
}

impl CanonicalMapSpec {
    pub fn new(source_dim: usize, mut gamma: Vec<Vec<u32>>) -> Result<Self> {
        if source_dim == 0 {
            return Err(invalid!("source dimension must be positive"));
        }
        if gamma.is_empty() {
            return Err(invalid!("the multi-index set must be nonempty"));
        }
        for g in &gamma {
            if g.len() != source_dim {
                return Err(invalid!("multi-index {g:?} does not have {source_dim} entries"));
            }
            if g.iter().all(|&e| e == 0) {
                return Err(invalid!("the zero multi-index is not allowed"));
            }
        }
        gamma.sort();
        if gamma.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid!("repeated multi-index"));
        }
        Ok(Self { source_dim, gamma })
    }

    /// `y -> (y^a)_(a in degrees)` on the line.
    pub fn curve(degrees: &[u32]) -> Result<Self> {
        Self::new(1, degrees.iter().map(|&a| vec![a]).collect())
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn target_dim(&self) -> usize {
        self.gamma.len()
    }

    pub fn gamma(&self) -> &[Vec<u32>] {
        &self.gamma
    }

    /// `|gamma|` for each multi-index, the diagonal of the dilation matrix.
    pub fn degrees(&self) -> Vec<u32> {
        self.gamma.iter().map(|g| g.iter().sum()).collect()
    }

    pub fn max_degree(&self) -> u32 {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn eval_into(&self, y: &[f64], out: &mut [f64]) {
        for (o, g) in out.iter_mut().zip(&self.gamma) {
            *o = g.iter().zip(y).map(|(&e, &v)| v.powi(e as i32)).product();
        }
    }

    pub fn eval(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.gamma.len()];
        self.eval_into(y, &mut out);
        out
    }

    /// `t^A xi`, i.e. `xi_gamma t^|gamma|`.
    pub fn dilate(&self, t: f64, xi: &[f64]) -> Vec<f64> {
        xi.iter()
            .zip(self.degrees())
            .map(|(&x, d)| x * t.powi(d as i32))
            .collect()
    }

    /// `sum_gamma t^|gamma| |xi_gamma|`.
    pub fn lambda(&self, t: f64, xi: &[f64]) -> f64 {
        self.dilate(t, xi).iter().map(|v| v.abs()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    /// The field is periodic with period `M h`.
    Periodic,
    /// The field vanishes outside `[-M/2, M/2)^d h`.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadonConfig {
    pub spacing: f64,
    pub boundary: Boundary,
    /// Target change between successive panel doublings, relative to
    /// `max(1, max |f|)`.
    pub tolerance: f64,
    pub max_level: u32,
    /// Outer truncation radius of singular integrals.
    pub r_max: Option<f64>,
}

impl Default for RadonConfig {
    fn default() -> Self {
        Self {
            spacing: 1.0,
            boundary: Boundary::Periodic,
            tolerance: 1e-8,
            max_level: 6,
            r_max: None,
        }
    }
}

/// An operator output with its quadrature bookkeeping.
#[derive(Debug, Clone)]
pub struct RadonReport {
    pub field: LatticeField,
    /// Panel doublings used.
    pub level: u32,
    pub nodes: usize,
    /// Maximal change from the previous doubling.
    pub estimated_error: f64,
    /// Set when the tolerance was not reached by `max_level`.
    pub warning: bool,
}

#[derive(Debug, Clone, Copy)]
enum Region {
    Inner { t: f64 },
    Shell { s: f64, t: f64 },
    Outer { t: f64, r_max: f64 },
}

impl Region {
    fn radii(self, rho: f64) -> (f64, f64) {
        match self {
            Region::Inner { t } => (0.0, t * rho),
            Region::Shell { s, t } => (s * rho, t * rho),
            Region::Outer { t, r_max } => (t * rho, r_max.max(t * rho)),
        }
    }
}

/// Splits `[a, b]` at `a 2^j` when `a > 0`.
fn dyadic_segments(a: f64, b: f64) -> Vec<(f64, f64)> {
    if b <= a {
        return Vec::new();
    }
    if a <= 0.0 {
        return vec![(a, b)];
    }
    let mut out = Vec::new();
    let mut lo = a;
    while lo < b {
        let hi = (2.0 * lo).min(b);
        out.push((lo, hi));
        lo = hi;
    }
    out
}

/// Directions `(unit vector, angular weight)` covering the sphere of the
/// source space, refined `2^level` times per smooth arc; `half` keeps one
/// of each antipodal pair.
fn directions(body: &ConvexBodySpec, level: u32, half: bool) -> Result<Vec<(Vec<f64>, f64)>> {
    match body.dim {
        1 => {
            let mut d = vec![(vec![1.0], 1.0)];
            if !half {
                d.push((vec![-1.0], 1.0));
            }
            Ok(d)
        }
        2 => {
            let end = if half { PI } else { 2.0 * PI };
            let mut cuts: Vec<f64> = body.kink_angles().into_iter().filter(|&a| a < end).collect();
            cuts.push(0.0);
            cuts.push(end);
            cuts.sort_by(f64::total_cmp);
            cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
            let panels = 1usize << level;
            let gl = GaussLegendre::g16();
            let mut out = Vec::new();
            for w in cuts.windows(2) {
                let h = (w[1] - w[0]) / panels as f64;
                for p in 0..panels {
                    let lo = w[0] + p as f64 * h;
                    for (th, wt) in gl.mapped(lo, lo + h) {
                        out.push((vec![th.cos(), th.sin()], wt));
                    }
                }
            }
            Ok(out)
        }
        k => Err(invalid!("Radon quadrature supports source dimension k <= 2, got {k}")),
    }
}

/// Radii in `(a, b)` where a component of `P(r u)` crosses a lattice
/// hyperplane; between them the interpolated field is a polynomial in `r`.
fn lattice_crossings(gamma: &CanonicalMapSpec, u: &[f64], a: f64, b: f64, spacing: f64) -> Vec<f64> {
    const CAP: usize = 1 << 16;
    let mut out = Vec::new();
    for (g, d) in gamma.gamma().iter().zip(gamma.degrees()) {
        let c: f64 = g.iter().zip(u).map(|(&e, &v)| v.powi(e as i32)).product::<f64>().abs();
        if c == 0.0 {
            continue;
        }
        let lo = c * a.powi(d as i32) / spacing;
        let hi = c * b.powi(d as i32) / spacing;
        let first = lo.floor() as i64 + 1;
        let last = hi.ceil() as i64 - 1;
        if last - first + 1 > CAP as i64 || out.len() > CAP {
            return Vec::new();
        }
        for n in first..=last {
            let r = (n as f64 * spacing / c).powf(1.0 / d as f64);
            if r > a && r < b {
                out.push(r);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * y.abs());
    out
}

/// Quadrature nodes `(y, w)` for `int_region g(y) dy` in polar form. With a
/// lattice, radial panels also break where `P(y)` crosses lattice planes.
fn region_nodes(
    body: &ConvexBodySpec,
    region: Region,
    level: u32,
    half: bool,
    lattice: Option<(&CanonicalMapSpec, f64)>,
) -> Result<Vec<(Vec<f64>, f64)>> {
    let k = body.dim;
    let gl = GaussLegendre::g16();
    let panels = 1usize << level;
    let mut out = Vec::new();
    for (u, wu) in directions(body, level, half)? {
        let (a, b) = region.radii(body.radial(&u));
        for (lo, hi) in dyadic_segments(a, b) {
            let mut cuts = vec![lo];
            if let Some((gamma, h)) = lattice {
                cuts.extend(lattice_crossings(gamma, &u, lo, hi, h));
            }
            cuts.push(hi);
            for w in cuts.windows(2) {
                let h = (w[1] - w[0]) / panels as f64;
                for p in 0..panels {
                    let s = w[0] + p as f64 * h;
                    for (r, wr) in gl.mapped(s, s + h) {
                        let y: Vec<f64> = u.iter().map(|c| c * r).collect();
                        out.push((y, wu * wr * r.powi(k as i32 - 1)));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Adds `coef * f(x - shift h)` (multilinear interpolation) to `out`.
fn accumulate_shift(out: &mut [Complex64], field: &LatticeField, shift: &[f64], coef: Complex64, boundary: Boundary) {
    let (d, m) = (field.dims(), field.side());
    let half = (m / 2) as isize;
    let mut base = vec![0isize; d];
    let mut frac = vec![0.0; d];
    for i in 0..d {
        let fl = shift[i].floor();
        base[i] = fl as isize;
        frac[i] = shift[i] - fl;
    }
    // per-axis source indices for each corner bit, usize::MAX meaning zero
    let mut tables: Vec<[Vec<usize>; 2]> = Vec::with_capacity(d);
    let mut stride = 1usize;
    let mut strides = vec![0usize; d];
    for i in (0..d).rev() {
        strides[i] = stride;
        stride *= m;
    }
    for (i, &stride) in strides.iter().enumerate() {
        let mk = |bit: isize| -> Vec<usize> {
            (0..m as isize)
                .map(|x| {
                    // signed coordinate of x in [-M/2, M/2)
                    let xs = if x >= m as isize - half { x - m as isize } else { x };
                    let src = xs - base[i] - bit;
                    match boundary {
                        Boundary::Periodic => src.rem_euclid(m as isize) as usize * stride,
                        Boundary::Zero => {
                            if src < -half || src >= m as isize - half {
                                usize::MAX
                            } else {
                                src.rem_euclid(m as isize) as usize * stride
                            }
                        }
                    }
                })
                .collect()
        };
        tables.push([mk(0), mk(1)]);
    }
    let values = field.values();
    for corner in 0..(1usize << d) {
        let mut w = 1.0;
        for (i, f) in frac.iter().enumerate() {
            w *= if corner >> i & 1 == 1 { *f } else { 1.0 - f };
        }
        if w == 0.0 {
            continue;
        }
        let c = coef * w;
        let cols: Vec<&Vec<usize>> = (0..d).map(|i| &tables[i][corner >> i & 1]).collect();
        let mut coords = vec![0usize; d];
        for slot in out.iter_mut() {
            let mut idx = 0usize;
            let mut zero = false;
            for (i, &x) in coords.iter().enumerate() {
                let s = cols[i][x];
                if s == usize::MAX {
                    zero = true;
                    break;
                }
                idx += s;
            }
            if !zero {
                *slot += values[idx] * c;
            }
            increment_coords(&mut coords, m);
        }
    }
}

fn check_shapes(field: &LatticeField, gamma: &CanonicalMapSpec, body: &ConvexBodySpec, config: &RadonConfig) -> Result<()> {
    body.validate()?;
    if body.dim != gamma.source_dim() {
        return Err(invalid!(
            "body lives in R^{} but the map has source dimension {}",
            body.dim,
            gamma.source_dim()
        ));
    }
    if field.dims() != gamma.target_dim() {
        return Err(invalid!(
            "field is {}-dimensional but the map has {} components",
            field.dims(),
            gamma.target_dim()
        ));
    }
    if !(config.spacing.is_finite() && config.spacing > 0.0) {
        return Err(invalid!("lattice spacing must be positive"));
    }
    if !(config.tolerance > 0.0) {
        return Err(invalid!("tolerance must be positive"));
    }
    Ok(())
}

fn check_scale(t: f64) -> Result<()> {
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid!("scale must be positive and finite, got {t}"));
    }
    Ok(())
}

/// Runs the doubling loop for `sum_i w_i g(y_i) [f(x - P(y_i)) - f(x - P(-y_i))]`
/// (the second term only when `paired`).
#[allow(clippy::too_many_arguments)]
fn integrate_field(
    field: &LatticeField,
    gamma: &CanonicalMapSpec,
    body: &ConvexBodySpec,
    region: Region,
    config: &RadonConfig,
    paired: bool,
    weight: &dyn Fn(&[f64]) -> f64,
    normalise: bool,
) -> Result<RadonReport> {
    let scale = field.max_abs().max(1.0);
    let mut prev: Option<LatticeField> = None;
    let mut shift = vec![0.0; gamma.target_dim()];
    let mut neg = vec![0.0; gamma.source_dim()];
    let mut last_err = f64::INFINITY;
    for level in 0..=config.max_level {
        let nodes = region_nodes(body, region, level, paired, Some((gamma, config.spacing)))?;
        let total: f64 = nodes.iter().map(|(_, w)| w).sum();
        let norm = if normalise { 1.0 / total } else { 1.0 };
        let mut out = vec![Complex64::new(0.0, 0.0); field.len()];
        for (y, w) in &nodes {
            let c = w * norm * weight(y);
            if c == 0.0 {
                continue;
            }
            gamma.eval_into(y, &mut shift);
            shift.iter_mut().for_each(|s| *s /= config.spacing);
            accumulate_shift(&mut out, field, &shift, Complex64::new(c, 0.0), config.boundary);
            if paired {
                neg.iter_mut().zip(y).for_each(|(n, v)| *n = -v);
                gamma.eval_into(&neg, &mut shift);
                shift.iter_mut().for_each(|s| *s /= config.spacing);
                accumulate_shift(&mut out, field, &shift, Complex64::new(-c, 0.0), config.boundary);
            }
        }
        let cur = LatticeField::new(field.dims(), field.side(), out)?;
        if let Some(p) = &prev {
            last_err = cur.max_abs_diff(p);
            if last_err <= config.tolerance * scale {
                return Ok(RadonReport {
                    field: cur,
                    level,
                    nodes: nodes.len(),
                    estimated_error: last_err,
                    warning: false,
                });
            }
        }
        if level == config.max_level {
            return Ok(RadonReport {
                field: cur,
                level,
                nodes: nodes.len(),
                estimated_error: last_err,
                warning: true,
            });
        }
        prev = Some(cur);
    }
    unreachable!("loop returns at max_level")
}

/// `|Omega_t|^-1 int_(Omega_t) f(x - P(y)) dy` on the lattice `h Z_M^d`,
/// with multilinear interpolation of `f` between lattice points.
pub fn radon_average(
    field: &LatticeField,
    gamma: &CanonicalMapSpec,
    body: &ConvexBodySpec,
    t: f64,
    config: &RadonConfig,
) -> Result<RadonReport> {
    check_shapes(field, gamma, body, config)?;
    check_scale(t)?;
    integrate_field(field, gamma, body, Region::Inner { t }, config, false, &|_| 1.0, true)
}

fn check_kernel(kernel: &KernelSpec, body: &ConvexBodySpec) -> Result<()> {
    if kernel.dim() != body.dim {
        return Err(invalid!("kernel lives in R^{}, body in R^{}", kernel.dim(), body.dim));
    }
    kernel.validate(2000, 0)?;
    if kernel.is_odd() && !body.is_symmetric() {
        return Err(invalid!("an odd kernel only cancels over symmetric bodies"));
    }
    Ok(())
}

/// `int_(|y| <= r_max, y outside Omega_t) f(x - P(y)) K(y) dy`, the truncated
/// singular Radon transform cut off at the configured outer radius. Odd
/// kernels are integrated over antipodal pairs so that constants cancel
/// exactly.
pub fn radon_singular(
    field: &LatticeField,
    gamma: &CanonicalMapSpec,
    body: &ConvexBodySpec,
    t: f64,
    kernel: &KernelSpec,
    config: &RadonConfig,
) -> Result<RadonReport> {
    check_shapes(field, gamma, body, config)?;
    check_scale(t)?;
    check_kernel(kernel, body)?;
    let r_max = config
        .r_max
        .ok_or_else(|| invalid!("singular transforms need an outer radius r_max"))?;
    let region = Region::Outer { t, r_max };
    integrate_field(field, gamma, body, region, config, kernel.is_odd(), &|y| kernel.eval(y), false)
}

/// `int_(Omega_t \ Omega_s) f(x - P(y)) K(y) dy`, or with `|K|` when
/// `absolute` is set.
#[allow(clippy::too_many_arguments)]
pub fn radon_increment(
    field: &LatticeField,
    gamma: &CanonicalMapSpec,
    body: &ConvexBodySpec,
    s: f64,
    t: f64,
    kernel: &KernelSpec,
    absolute: bool,
    config: &RadonConfig,
) -> Result<RadonReport> {
    check_shapes(field, gamma, body, config)?;
    check_scale(s)?;
    check_scale(t)?;
    if s >= t {
        return Err(invalid!("increment needs s < t, got s = {s}, t = {t}"));
    }
    check_kernel(kernel, body)?;
    let region = Region::Shell { s, t };
    if absolute {
        integrate_field(field, gamma, body, region, config, false, &|y| kernel.eval(y).abs(), false)
    } else {
        integrate_field(field, gamma, body, region, config, kernel.is_odd(), &|y| kernel.eval(y), false)
    }
}

/// `int_region e^(-2 pi i xi . P(y)) g(y) dy` with oscillatory quadrature
/// along rays and Gauss–Legendre panels in the angle.
fn symbol_integral(
    gamma: &CanonicalMapSpec,
    body: &ConvexBodySpec,
    region: Region,
    xi: &[f64],
    weight: &dyn Fn(&[f64]) -> f64,
) -> Result<Oscillatory> {
    if xi.len() != gamma.target_dim() {
        return Err(invalid!("frequency has {} components, map has {}", xi.len(), gamma.target_dim()));
    }
    let k = body.dim;
    let degrees = gamma.degrees();
    let ray = |u: &[f64]| -> Result<Oscillatory> {
        // coefficient of r^|gamma| along the ray
        let coef: Vec<f64> = gamma
            .gamma()
            .iter()
            .zip(xi)
            .map(|(g, &x)| x * g.iter().zip(u).map(|(&e, &v)| v.powi(e as i32)).product::<f64>())
            .collect();
        let phase = |r: f64| -2.0 * PI * coef.iter().zip(&degrees).map(|(c, &d)| c * r.powi(d as i32)).sum::<f64>();
        let slope = |_: f64, b: f64| {
            2.0 * PI
                * coef
                    .iter()
                    .zip(&degrees)
                    .map(|(c, &d)| (c * d as f64).abs() * b.abs().powi(d as i32 - 1))
                    .sum::<f64>()
        };
        let (a, b) = region.radii(body.radial(u));
        let mut acc = Oscillatory {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            panels: 0,
        };
        for (lo, hi) in dyadic_segments(a, b) {
            let amp = |r: f64| {
                let mut y = [0.0; 2];
                y.iter_mut().zip(u).for_each(|(s, c)| *s = c * r);
                weight(&y[..k]) * r.powi(k as i32 - 1)
            };
            let part = oscillatory_integral(lo, hi, phase, slope, amp).map_err(Error::NumericFailure)?;
            acc.value += part.value;
            acc.error += part.error;
            acc.panels += part.panels;
        }
        Ok(acc)
    };
    match k {
        1 => {
            let mut acc = ray(&[1.0])?;
            let b = ray(&[-1.0])?;
            acc.value += b.value;
            acc.error += b.error;
            acc.panels += b.panels;
            Ok(acc)
        }
        2 => {
            let mut prev: Option<Oscillatory> = None;
            for level in 2..=12 {
                let mut acc = Oscillatory {
                    value: Complex64::new(0.0, 0.0),
                    error: 0.0,
                    panels: 0,
                };
                for (u, w) in directions(body, level, false)? {
                    let r = ray(&u)?;
                    acc.value += r.value * w;
                    acc.error += r.error * w;
                    acc.panels += r.panels;
                }
                if let Some(p) = prev {
                    let diff = (acc.value - p.value).norm();
                    if diff <= 1e-10 * acc.value.norm().max(1e-3) || level == 12 {
                        acc.error += diff;
                        return Ok(acc);
                    }
                }
                prev = Some(acc);
            }
            unreachable!("loop returns at the last level")
        }
        k => Err(invalid!("symbol quadrature supports source dimension k <= 2, got {k}")),
    }
}

/// `|Omega_t|^-1 int_(Omega_t) e^(-2 pi i xi . P(y)) dy`.
pub fn radon_average_symbol(gamma: &CanonicalMapSpec, body: &ConvexBodySpec, t: f64, xi: &[f64]) -> Result<Oscillatory> {
    check_scale(t)?;
    if body.dim != gamma.source_dim() {
        return Err(invalid!("body and map have different source dimensions"));
    }
    let vol = body.volume() * t.powi(body.dim as i32);
    let mut r = symbol_integral(gamma, body, Region::Inner { t }, xi, &|_| 1.0)?;
    r.value /= vol;
    r.error /= vol;
    Ok(r)
}

/// `Psi_t(xi) - Psi_s(xi) = -int_(Omega_t \ Omega_s) e^(-2 pi i xi . P(y)) K(y) dy`
/// for `s < t`, where `Psi_t` is the multiplier of the truncated singular
/// transform.
pub fn psi_difference(
    gamma: &CanonicalMapSpec,
    body: &ConvexBodySpec,
    kernel: &KernelSpec,
    s: f64,
    t: f64,
    xi: &[f64],
) -> Result<Oscillatory> {
    check_scale(s)?;
    check_scale(t)?;
    if s >= t {
        return Err(invalid!("need s < t, got s = {s}, t = {t}"));
    }
    if body.dim != gamma.source_dim() || kernel.dim() != body.dim {
        return Err(invalid!("body, kernel and map must share the source dimension"));
    }
    let mut r = symbol_integral(gamma, body, Region::Shell { s, t }, xi, &|y| kernel.eval(y))?;
    r.value = -r.value;
    Ok(r)
}

/// `(min, max)` of the radial function of `body` over directions: the body
/// contains the ball of the first radius and lies in the ball of the second.
pub fn radial_extent(body: &ConvexBodySpec) -> Result<(f64, f64)> {
    let dirs = match body.dim {
        1 | 2 => {
            let mut d: Vec<Vec<f64>> = directions(body, 8, false)?.into_iter().map(|(u, _)| u).collect();
            if body.dim == 2 {
                d.extend(body.kink_angles().into_iter().map(|a| vec![a.cos(), a.sin()]));
            }
            d
        }
        k => crate::fourier::directions(k, 4096, 0),
    };
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for u in dirs {
        let r = body.radial(&u);
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok((lo, hi))
}
