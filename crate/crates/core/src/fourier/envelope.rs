use serde::{Deserialize, Serialize};

use super::symbols::{euclidean_norm, SymbolFamily};
use crate::averaging::ModulusOfContinuity;

/// A homogeneous gauge on frequency space.
pub trait QuasiNorm {
    fn eval(&self, xi: &[f64]) -> f64;
}

/// The Euclidean norm as a quasi-norm.
#[derive(Debug, Clone, Copy, Default)]
pub struct Euclidean;

impl QuasiNorm for Euclidean {
    fn eval(&self, xi: &[f64]) -> f64 {
        euclidean_norm(xi)
    }
}

impl<F: Fn(&[f64]) -> f64> QuasiNorm for F {
    fn eval(&self, xi: &[f64]) -> f64 {
        self(xi)
    }
}

/// Worst ratios of a symbol family against its modulus envelopes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    /// `max |m_t(xi) - m_t(0)| / omega(t q(xi))` over samples with `t q <= 1`.
    pub low_ratio: f64,
    /// `max |m_t(xi)| / omega((t q(xi))^-1)` over samples with `t q >= 1`.
    pub high_ratio: f64,
    pub low_samples: usize,
    pub high_samples: usize,
    pub constant: f64,
    pub passes: bool,
}

fn ratio(num: f64, den: f64) -> f64 {
    if num <= 1e-300 {
        0.0
    } else if den <= 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

/// Checks `|m_t(xi) - m_t(0)| <= C omega(t q(xi))` where `t q(xi) <= 1` and
/// `|m_t(xi)| <= C omega((t q(xi))^-1)` where `t q(xi) >= 1`.
pub fn symbol_envelope_check(
    family: &SymbolFamily,
    omega: &ModulusOfContinuity,
    quasi_norm: &dyn QuasiNorm,
    t_grid: &[f64],
    xi_grid: &[Vec<f64>],
    constant: f64,
) -> EnvelopeReport {
    let mut rep = EnvelopeReport {
        low_ratio: 0.0,
        high_ratio: 0.0,
        low_samples: 0,
        high_samples: 0,
        constant,
        passes: true,
    };
    for &t in t_grid {
        let at_zero = family
            .value_at_zero()
            .unwrap_or_else(|| family.eval(t, &vec![0.0; xi_grid.first().map_or(1, Vec::len)]));
        for xi in xi_grid {
            let s = t * quasi_norm.eval(xi);
            let m = family.eval(t, xi);
            if s <= 1.0 {
                rep.low_ratio = rep.low_ratio.max(ratio((m - at_zero).norm(), omega.eval(s)));
                rep.low_samples += 1;
            }
            if s >= 1.0 {
                rep.high_ratio = rep.high_ratio.max(ratio(m.norm(), omega.eval(1.0 / s)));
                rep.high_samples += 1;
            }
        }
    }
    rep.passes = rep.low_ratio <= constant && rep.high_ratio <= constant;
    rep
}

/// Largest `|m_(t+h)(xi) - m_t(xi)| t / h` over the grids, the constant of a
/// Lipschitz-in-scale bound `|m_(t+h) - m_t| <= C h / t`.
pub fn lipschitz_constant(family: &SymbolFamily, t_grid: &[f64], h_grid: &[f64], xi_grid: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for &t in t_grid {
        for &h in h_grid {
            for xi in xi_grid {
                let d = (family.eval(t + h, xi) - family.eval(t, xi)).norm();
                worst = worst.max(d * t / h);
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Vec<Vec<f64>> {
        crate::numeric::log_space(1e-4, 1e4, 300).into_iter().map(|x| vec![x]).collect()
    }

    #[test]
    fn cube_symbol_high_frequency_bound() {
        let fam = SymbolFamily::continuous_cube();
        let rep = symbol_envelope_check(
            &fam,
            &ModulusOfContinuity::linear(1.0),
            &Euclidean,
            &[1.0],
            &grid(),
            1.0 / (2.0 * PI),
        );
        assert!(rep.high_ratio <= 1.0 / (2.0 * PI) * (1.0 + 1e-12));
        assert!(rep.high_samples > 0 && rep.low_samples > 0);
    }

    #[test]
    fn no_violation_at_the_origin() {
        let fam = SymbolFamily::continuous_cube();
        let rep = symbol_envelope_check(
            &fam,
            &ModulusOfContinuity::linear(1.0),
            &Euclidean,
            &[0.5, 2.0],
            &[vec![0.0]],
            1.0,
        );
        assert_eq!(rep.low_ratio, 0.0);
    }

    #[test]
    fn cube_symbol_is_lipschitz_in_scale() {
        let fam = SymbolFamily::continuous_cube();
        let c = lipschitz_constant(&fam, &[0.5, 1.0, 2.0], &[1e-3, 1e-2, 0.1], &grid());
        assert!(c.is_finite() && c > 0.0 && c < 2.0);
    }
}
