use num_complex::Complex64;

use super::path::{is_zero, SampledPath, Time};
use crate::error::{invalid, Result};
use crate::numeric::compensated_sum;

/// `r`-variation of a sampled path, the supremum over increasing subsequences
/// of the `l^r` norm of consecutive increments. `r = f64::INFINITY` gives the
/// largest pairwise difference.
pub fn variation(path: &SampledPath, r: f64) -> Result<f64> {
    if r.is_nan() || r <= 0.0 {
        return Err(invalid!("variation exponent must be positive, got {r}"));
    }
    Ok(variation_of(path.values(), r))
}

pub(crate) fn variation_of(values: &[Complex64], r: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    if r.is_infinite() {
        let mut best: f64 = 0.0;
        for j in 1..n {
            for i in 0..j {
                best = best.max((values[j] - values[i]).norm());
            }
        }
        return best;
    }
    if r <= 1.0 {
        // subadditivity of |.|^r makes the full grid optimal
        let s = compensated_sum(values.windows(2).map(|w| (w[1] - w[0]).norm().powf(r)));
        return s.powf(1.0 / r);
    }
    let mut best = vec![0.0f64; n];
    let mut overall: f64 = 0.0;
    for j in 1..n {
        let mut b: f64 = 0.0;
        for i in 0..j {
            b = b.max(best[i] + (values[j] - values[i]).norm().powf(r));
        }
        best[j] = b;
        overall = overall.max(b);
    }
    overall.powf(1.0 / r)
}

/// Checks that `times` is `{u h : 0 <= u <= n}` with `n` and `n h` powers of
/// two, and returns `n`.
fn dyadic_grid_len(times: &[Time]) -> Result<usize> {
    let n = times.len() - 1;
    if !is_zero(&times[0]) {
        return Err(invalid!("dyadic grid must start at 0"));
    }
    if n == 0 {
        return Ok(0);
    }
    if !n.is_power_of_two() {
        return Err(invalid!("dyadic grid needs a power-of-two number of steps, got {n}"));
    }
    if !times[n].is_power_of_two() {
        return Err(invalid!("dyadic grid must end at a power of two, got {}", times[n]));
    }
    let step = times[1] - times[0];
    for (u, t) in times.iter().enumerate() {
        if *t != step * u as i64 {
            return Err(invalid!("dyadic grid must be equally spaced"));
        }
    }
    Ok(n)
}

/// Both sides of the dyadic square-function bound for `r`-variation on a
/// full dyadic grid `[0, 2^k]`:
///
/// `V^r(g) <= 2^(1 - 1/r) sum_l (sum_m |g((m+1) 2^(k-l)) - g(m 2^(k-l))|^r)^(1/r)`.
///
/// Returns `(lhs, rhs)`.
pub fn lewko_bound(path: &SampledPath, r: f64) -> Result<(f64, f64)> {
    if r.is_nan() || !(1.0..f64::INFINITY).contains(&r) {
        return Err(invalid!("exponent must lie in [1, inf), got {r}"));
    }
    let n = dyadic_grid_len(path.times())?;
    let g = path.values();
    let lhs = variation_of(g, r);
    let mut levels = Vec::new();
    let mut stride = n;
    while stride >= 1 {
        let inner = compensated_sum(
            (0..n / stride).map(|m| (g[(m + 1) * stride] - g[m * stride]).norm().powf(r)),
        );
        levels.push(inner.powf(1.0 / r));
        stride /= 2;
    }
    let rhs = 2f64.powf(1.0 - 1.0 / r) * compensated_sum(levels);
    Ok((lhs, rhs))
}
