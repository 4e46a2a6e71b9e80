use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::path::{FieldOfPaths, SampledPath};
use crate::error::{invalid, Result};
use crate::numeric::CompensatedSum;

/// Relative slack applied when comparing floating-point jump magnitudes
/// against a threshold.
pub const JUMP_SLACK: f64 = 1e-12;

#[inline]
pub(crate) fn reaches(magnitude: f64, lambda: f64) -> bool {
    magnitude >= lambda * (1.0 - JUMP_SLACK)
}

#[inline]
fn gap(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm()
}

/// Largest `J` such that some increasing subsequence `t_0 < ... < t_J` has
/// every consecutive increment of modulus at least `lambda`.
///
/// Computed exactly by dynamic programming over chain endpoints.
pub fn jump_count(path: &SampledPath, lambda: f64) -> Result<usize> {
    if !(lambda > 0.0) || lambda.is_nan() {
        return Err(invalid!("jump threshold must be positive, got {lambda}"));
    }
    Ok(count_chain(path.values(), lambda))
}

/// Jump count on raw values, without validation.
pub(crate) fn count_chain(values: &[Complex64], lambda: f64) -> usize {
    let n = values.len();
    let mut best = vec![0usize; n];
    let mut overall = 0;
    for j in 1..n {
        let mut b = 0;
        for i in 0..j {
            if best[i] + 1 > b && reaches(gap(values[j], values[i]), lambda) {
                b = best[i] + 1;
            }
        }
        best[j] = b;
        overall = overall.max(b);
    }
    overall
}

/// The step function `lambda -> N_lambda` of one path.
///
/// Breakpoints are `(magnitude, count)` pairs with strictly increasing
/// magnitudes and strictly decreasing counts. For `lambda > 0` the count is
/// the one attached to the smallest breakpoint magnitude `>= lambda`, or zero
/// if there is none.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpProfile {
    breakpoints: Vec<(f64, usize)>,
}

impl JumpProfile {
    pub fn breakpoints(&self) -> &[(f64, usize)] {
        &self.breakpoints
    }

    pub fn is_empty(&self) -> bool {
        self.breakpoints.is_empty()
    }

    /// `N_lambda` recovered from the profile.
    pub fn count(&self, lambda: f64) -> usize {
        let idx = self.breakpoints.partition_point(|&(m, _)| !reaches(m, lambda));
        self.breakpoints.get(idx).map_or(0, |&(_, c)| c)
    }

    /// `sup_lambda lambda * N_lambda^(1/2)`, attained at a breakpoint.
    pub fn sup_scaled(&self) -> f64 {
        self.breakpoints
            .iter()
            .map(|&(m, c)| m * (c as f64).sqrt())
            .fold(0.0, f64::max)
    }
}

/// Exact breakpoints of `lambda -> N_lambda(path)`.
pub fn jump_breakpoints(path: &SampledPath) -> JumpProfile {
    profile_of(path.values())
}

pub(crate) fn profile_of(values: &[Complex64]) -> JumpProfile {
    let n = values.len();
    let mut mags = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    for j in 1..n {
        for i in 0..j {
            let m = gap(values[j], values[i]);
            if m > 0.0 {
                mags.push(m);
            }
        }
    }
    if mags.is_empty() {
        return JumpProfile {
            breakpoints: Vec::new(),
        };
    }
    mags.sort_by(f64::total_cmp);
    mags.dedup();

    // counts[i] = N at mags[i]; nonincreasing, so bisect for the jumps
    let k = mags.len();
    let mut counts = vec![usize::MAX; k];
    counts[0] = count_chain(values, mags[0]);
    counts[k - 1] = count_chain(values, mags[k - 1]);
    fill_counts(values, &mags, &mut counts, 0, k - 1);

    let mut breakpoints = Vec::new();
    for i in 0..k {
        let next = if i + 1 < k { counts[i + 1] } else { 0 };
        if counts[i] > next {
            breakpoints.push((mags[i], counts[i]));
        }
    }
    JumpProfile { breakpoints }
}

fn fill_counts(values: &[Complex64], mags: &[f64], counts: &mut [usize], lo: usize, hi: usize) {
    if hi <= lo + 1 {
        return;
    }
    if counts[lo] == counts[hi] {
        let c = counts[lo];
        counts[lo + 1..hi].iter_mut().for_each(|x| *x = c);
        return;
    }
    let mid = lo + (hi - lo) / 2;
    counts[mid] = count_chain(values, mags[mid]);
    fill_counts(values, mags, counts, lo, mid);
    fill_counts(values, mags, counts, mid, hi);
}

/// One change of an atom's jump count when `lambda` decreases through
/// `magnitude`.
#[derive(Debug, Clone, Copy)]
struct JumpEvent {
    magnitude: f64,
    weight: f64,
    count_new: u32,
    count_old: u32,
}

/// Merged breakpoint events of many weighted atoms, from which the jump
/// quasi-seminorm can be evaluated exactly for any exponent.
#[derive(Debug, Clone, Default)]
pub struct JumpEvents {
    events: Vec<JumpEvent>,
    sorted: bool,
}

impl JumpEvents {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            events: Vec::with_capacity(n),
            sorted: false,
        }
    }

    /// Adds the profile of an atom with the given weight.
    pub fn push_profile(&mut self, weight: f64, profile: &JumpProfile) {
        let bps = profile.breakpoints();
        for (i, &(m, c)) in bps.iter().enumerate() {
            let older = bps.get(i + 1).map_or(0, |&(_, c)| c);
            self.events.push(JumpEvent {
                magnitude: m,
                weight,
                count_new: c as u32,
                count_old: older as u32,
            });
        }
        self.sorted = false;
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// `sup_lambda (sum_x w_x lambda^p N_lambda(x)^(p/2))^(1/p)`.
    pub fn seminorm(&mut self, p: f64) -> Result<f64> {
        check_exponent(p)?;
        if !self.sorted {
            self.events
                .sort_unstable_by(|a, b| b.magnitude.total_cmp(&a.magnitude));
            self.sorted = true;
        }
        let half = p / 2.0;
        let mut powers: Vec<f64> = Vec::new();
        let mut pow = |n: u32| -> f64 {
            let n = n as usize;
            if n >= powers.len() {
                let start = powers.len();
                powers.extend((start..=n).map(|k| (k as f64).powf(half)));
            }
            powers[n]
        };
        let mut level = CompensatedSum::new();
        let mut best: f64 = 0.0;
        let mut i = 0;
        while i < self.events.len() {
            let m = self.events[i].magnitude;
            while i < self.events.len() && self.events[i].magnitude == m {
                let e = self.events[i];
                level.add(e.weight * (pow(e.count_new) - pow(e.count_old)));
                i += 1;
            }
            best = best.max(m.powf(p) * level.value());
        }
        Ok(best.max(0.0).powf(1.0 / p))
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p <= 1.0 || p.is_infinite() {
        return Err(invalid!("jump seminorm exponent must lie in (1, inf), got {p}"));
    }
    Ok(())
}

/// Jump quasi-seminorm `sup_lambda || lambda N_lambda^(1/2) ||_{L^p}` of a
/// weighted field of paths, evaluated exactly over all breakpoints.
pub fn jump_seminorm(field: &FieldOfPaths, p: f64) -> Result<f64> {
    check_exponent(p)?;
    if field.is_empty() {
        return Err(invalid!("jump seminorm of an empty field"));
    }
    let mut events = JumpEvents::new();
    for atom in field.atoms() {
        events.push_profile(atom.weight, &jump_breakpoints(&atom.path));
    }
    events.seminorm(p)
}
