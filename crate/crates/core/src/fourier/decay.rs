use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::symbols::{dyadic_envelope, SymbolFamily};
use crate::error::{invalid, Result};
use crate::numeric::CompensatedSum;

/// Default scale truncation `|k| <= 40`.
pub const DEFAULT_K_RANGE: RangeInclusive<i32> = -40..=40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub j: i32,
    /// Grid supremum of `(sum_k |M_k(xi) S_(k+j)(xi)|^2)^(1/2)` over the
    /// truncated scale range.
    pub a_j: f64,
    /// Bound on what the scales outside the range can add, assuming
    /// `|M_k S_(k+j)| <= tail_constant * env_k env_(k+j)`.
    pub tail_bound: f64,
    /// Frequency attaining `a_j`.
    pub argmax: Vec<f64>,
}

/// Best off-diagonal square-function constant `a_j` on the grid.
pub fn off_diagonal_decay(
    mk: &SymbolFamily,
    sk: &SymbolFamily,
    j: i32,
    k_range: RangeInclusive<i32>,
    xi_grid: &[Vec<f64>],
) -> Result<f64> {
    Ok(off_diagonal_report(mk, sk, j, k_range, xi_grid, 1.0)?.a_j)
}

/// [`off_diagonal_decay`] with the maximiser and an envelope tail bound.
pub fn off_diagonal_report(
    mk: &SymbolFamily,
    sk: &SymbolFamily,
    j: i32,
    k_range: RangeInclusive<i32>,
    xi_grid: &[Vec<f64>],
    tail_constant: f64,
) -> Result<DecayReport> {
    if k_range.is_empty() {
        return Err(invalid!("empty scale range"));
    }
    if xi_grid.is_empty() {
        return Err(invalid!("empty frequency grid"));
    }
    if xi_grid.iter().any(|xi| xi.iter().all(|&x| x == 0.0)) {
        return Err(invalid!("frequency grid must exclude the origin"));
    }
    let mut best = (0.0, 0usize);
    let mut tail: f64 = 0.0;
    for (i, xi) in xi_grid.iter().enumerate() {
        let mut s = CompensatedSum::new();
        for k in k_range.clone() {
            let v = mk.eval(k as f64, xi) * sk.eval((k + j) as f64, xi);
            s.add(v.norm_sqr());
        }
        let a = s.value().sqrt();
        if a > best.0 {
            best = (a, i);
        }
        tail = tail.max(envelope_tail(j, &k_range, xi));
    }
    Ok(DecayReport {
        j,
        a_j: best.0,
        tail_bound: tail_constant * tail,
        argmax: xi_grid[best.1].clone(),
    })
}

/// `(sum_(k outside range) (env_k env_(k+j))^2)^(1/2)`, summed until the
/// geometric remainder is negligible and closed with a ratio-1/4 bound.
fn envelope_tail(j: i32, range: &RangeInclusive<i32>, xi: &[f64]) -> f64 {
    let term = |k: i32| (dyadic_envelope(k, xi) * dyadic_envelope(k + j, xi)).powi(2);
    let mut s = CompensatedSum::new();
    for dir in [-1i32, 1] {
        let mut k = if dir < 0 { *range.start() - 1 } else { *range.end() + 1 };
        let mut last = f64::INFINITY;
        for _ in 0..4000 {
            let t = term(k);
            s.add(t);
            // once both envelopes are on their geometric branch the terms
            // shrink by at least a factor 4 per step
            let settled = t <= last && t < 1e-40;
            last = t;
            if settled {
                break;
            }
            k += dir;
        }
        s.add(last / 3.0);
    }
    s.value().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::symbols::PoissonKind;
    use num_complex::Complex64;

    fn grid() -> Vec<Vec<f64>> {
        crate::numeric::log_space(2f64.powi(-20), 2f64.powi(20), 400)
            .into_iter()
            .map(|x| vec![x])
            .collect()
    }

    #[test]
    fn zero_symbol_gives_zero() {
        let zero = SymbolFamily::custom("zero", |_, _| Complex64::new(0.0, 0.0));
        let s = SymbolFamily::dyadic_envelope();
        assert_eq!(off_diagonal_decay(&zero, &s, 3, DEFAULT_K_RANGE, &grid()).unwrap(), 0.0);
    }

    #[test]
    fn diagonal_littlewood_paley_is_at_most_one() {
        let s = SymbolFamily::littlewood_paley(PoissonKind::Continuous);
        let a0 = off_diagonal_decay(&s, &s, 0, DEFAULT_K_RANGE, &grid()).unwrap();
        assert!(a0 > 0.0 && a0 <= 1.0);
    }

    #[test]
    fn envelope_pair_decays() {
        let e = SymbolFamily::dyadic_envelope();
        let g = grid();
        let a0 = off_diagonal_decay(&e, &e, 0, DEFAULT_K_RANGE, &g).unwrap();
        for j in -20..=20 {
            let a = off_diagonal_report(&e, &e, j, DEFAULT_K_RANGE, &g, 1.0).unwrap();
            assert!(a.a_j <= a0 * 2f64.powf(-(j.abs() as f64) / 4.0) * (1.0 + 1e-12));
            assert!(a.tail_bound < 1e-6);
        }
    }

    #[test]
    #[allow(clippy::reversed_empty_ranges)]
    fn argument_checks() {
        let e = SymbolFamily::dyadic_envelope();
        assert!(off_diagonal_decay(&e, &e, 0, 1..=0, &grid()).is_err());
        assert!(off_diagonal_decay(&e, &e, 0, DEFAULT_K_RANGE, &[]).is_err());
        assert!(off_diagonal_decay(&e, &e, 0, DEFAULT_K_RANGE, &[vec![0.0]]).is_err());
    }
}
