use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use super::modulus::ModulusOfContinuity;
use crate::numeric::{CompensatedSum, GaussLegendre};

/// Number of geometric panels tried before an integral is declared divergent.
const MAX_PANELS: usize = 1000;
/// Panel-to-panel contribution ratio at or above which the tail is treated
/// as non-summable.
const DIVERGENCE_RATIO: f64 = 1.0 - 1e-3;
const SUBPANELS: usize = 4;

/// A norm that is either finite or detected as divergent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "value", rename_all = "kebab-case")]
pub enum Finiteness {
    Finite(f64),
    Divergent,
}

impl Finiteness {
    pub fn value(self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(v),
            Self::Divergent => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Self::Finite(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiniNorms {
    /// `int_0^1 omega(t) dt / t`.
    pub dini: Finiteness,
    /// `int_0^1 omega(t) |log t| dt / t`.
    pub log_dini: Finiteness,
    /// `sum_(j >= 1) omega(2^(-j/c))`.
    pub dini_sum: Finiteness,
    /// `sum_(j >= 1) (j/c) omega(2^(-j/c))`.
    pub log_dini_sum: Finiteness,
    pub c: f64,
}

/// Sums nonnegative panel contributions until they are negligible, or
/// reports divergence when they stop shrinking.
fn geometric_series(mut panel: impl FnMut(usize) -> f64) -> Finiteness {
    let mut total = CompensatedSum::new();
    let mut prev = f64::NAN;
    for j in 0..MAX_PANELS {
        let v = panel(j);
        if !v.is_finite() {
            return Finiteness::Divergent;
        }
        total.add(v);
        let s = total.value();
        if j >= 4 && v <= 1e-17 * s {
            return Finiteness::Finite(s);
        }
        if j >= 4 && s > 0.0 && v >= DIVERGENCE_RATIO * prev && v > 1e-12 * s {
            // still not decaying after many panels; only flag once the tail
            // has had room to show geometric decay
            if j >= 64 {
                return Finiteness::Divergent;
            }
        }
        prev = v;
    }
    Finiteness::Divergent
}

/// Dini and log-Dini norms of `omega`, with their dyadic-sum counterparts
/// at step `2^(-1/c)`.
///
/// With `t = e^(-u)` both integrals become `int_0^inf u^m omega(e^-u) du`,
/// which is integrated on the panels `[0, 1]`, `[2^j, 2^(j+1)]` with a
/// 20-point Gauss–Legendre rule on each quarter panel.
pub fn dini_norms(omega: &ModulusOfContinuity) -> DiniNorms {
    dini_norms_with_step(omega, 1.0)
}

pub fn dini_norms_with_step(omega: &ModulusOfContinuity, c: f64) -> DiniNorms {
    let gl = GaussLegendre::g20();
    let integral = |power: i32| {
        geometric_series(|j| {
            let (a, b) = if j == 0 { (0.0, 1.0) } else { (2f64.powi(j as i32 - 1), 2f64.powi(j as i32)) };
            let h = (b - a) / SUBPANELS as f64;
            (0..SUBPANELS)
                .map(|i| {
                    let lo = a + i as f64 * h;
                    gl.integrate(lo, lo + h, |u| u.powi(power) * omega.eval_exp(u))
                })
                .sum()
        })
    };
    let step = LN_2 / c;
    // group 8 consecutive terms per "panel" so the ratio test sees blocks
    let sum = |power: i32| {
        geometric_series(|block| {
            (1..=8)
                .map(|i| {
                    let j = (block * 8 + i) as f64;
                    (j / c).powi(power) * omega.eval_exp(j * step)
                })
                .sum()
        })
    };
    DiniNorms {
        dini: integral(0),
        log_dini: integral(1),
        dini_sum: sum(0),
        log_dini_sum: sum(1),
        c,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_modulus() {
        let n = dini_norms(&ModulusOfContinuity::Zero);
        assert_eq!(n.dini, Finiteness::Finite(0.0));
        assert_eq!(n.log_dini, Finiteness::Finite(0.0));
    }

    #[test]
    fn powers_match_closed_forms() {
        for theta in [0.1, 0.25, 0.5, 1.0] {
            let n = dini_norms(&ModulusOfContinuity::power(1.0, theta));
            let d = n.dini.value().unwrap();
            let l = n.log_dini.value().unwrap();
            assert!((d - 1.0 / theta).abs() < 1e-10 * d, "{theta} {d}");
            assert!((l - 1.0 / (theta * theta)).abs() < 1e-10 * l, "{theta} {l}");
            // sum_j 2^(-j theta) = 1 / (2^theta - 1)
            let s = n.dini_sum.value().unwrap();
            assert!((s - 1.0 / (2f64.powf(theta) - 1.0)).abs() < 1e-10 * s);
        }
    }

    #[test]
    fn log_decay_divergence_thresholds() {
        // omega(e^-u) ~ u^-alpha: Dini finite iff alpha > 1, log-Dini iff alpha > 2
        let n = dini_norms(&ModulusOfContinuity::log_decay(0.5));
        assert_eq!(n.dini, Finiteness::Divergent);
        assert_eq!(n.log_dini, Finiteness::Divergent);
        let n = dini_norms(&ModulusOfContinuity::log_decay(1.5));
        assert!(n.dini.is_finite());
        assert_eq!(n.log_dini, Finiteness::Divergent);
        let n = dini_norms(&ModulusOfContinuity::log_decay(3.0));
        assert!(n.dini.is_finite() && n.log_dini.is_finite());
    }

    #[test]
    fn monotone_under_domination() {
        let small = dini_norms(&ModulusOfContinuity::power(1.0, 0.5));
        let big = dini_norms(&ModulusOfContinuity::sum(vec![
            ModulusOfContinuity::power(1.0, 0.5),
            ModulusOfContinuity::power(0.5, 0.7),
        ]));
        assert!(big.dini.value().unwrap() >= small.dini.value().unwrap());
        assert!(big.log_dini.value().unwrap() >= small.log_dini.value().unwrap());
    }
}
