use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Interpolation exponents attached to a pair `1 <= q0 < q1 <= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentRecord {
    pub q0: f64,
    pub q1: f64,
    pub theta: f64,
    pub nu: f64,
    pub q_theta: f64,
}

impl ExponentRecord {
    /// Residuals of the identities tying the exponents together, in a fixed
    /// order: `1 - theta`, `theta`, `nu theta`, `nu`, `nu (1 - theta)`,
    /// `1 - nu`, the definition of `q_theta` and the convexity relation
    /// `1/q1 = nu/q_theta + (1 - nu)/2`.
    pub fn residuals(&self) -> [f64; 8] {
        let Self {
            q0,
            q1,
            theta,
            nu,
            q_theta,
        } = *self;
        [
            (1.0 - theta) - q0 / 2.0,
            theta - (2.0 - q0) / 2.0,
            nu * theta - (2.0 - q1) / 2.0,
            nu - (2.0 - q1) / (2.0 - q0),
            nu * (1.0 - theta) - (2.0 - q1) / (2.0 - q0) * q0 / 2.0,
            (1.0 - nu) - (q1 - q0) / (2.0 - q0),
            1.0 / q_theta - ((1.0 - theta) / q0 + theta / q1),
            1.0 / q1 - (nu / q_theta + (1.0 - nu) / 2.0),
        ]
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals().iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

/// `theta = (2 - q0)/2`, `nu = (2 - q1)/(2 - q0)` and
/// `1/q_theta = 1/2 + (1 - q0/2)/q1`.
pub fn interpolation_exponents(q0: f64, q1: f64) -> Result<ExponentRecord> {
    if !(q0 >= 1.0 && q0 < q1 && q1 <= 2.0) {
        return Err(invalid!("exponents must satisfy 1 <= q0 < q1 <= 2, got q0={q0}, q1={q1}"));
    }
    let theta = (2.0 - q0) / 2.0;
    let nu = (2.0 - q1) / (2.0 - q0);
    let q_theta = 1.0 / (0.5 + (1.0 - q0 / 2.0) / q1);
    Ok(ExponentRecord {
        q0,
        q1,
        theta,
        nu,
        q_theta,
    })
}

/// Iteration cap for [`bootstrap_fixed_point`].
pub const BOOTSTRAP_MAX_ITER: usize = 10_000;

/// Smallest positive solution of `B = C (1 + a B^((2 - q1)/2))`.
///
/// Iterates from `B = C`; the right-hand side is increasing and concave with
/// exponent below one, so the iterates increase to the smallest fixed point.
pub fn bootstrap_fixed_point(a: f64, q1: f64, c: f64) -> Result<f64> {
    if !(a >= 0.0 && a.is_finite()) {
        return Err(invalid!("a must be finite and nonnegative, got {a}"));
    }
    if !(q1 > 1.0 && q1 <= 2.0) {
        return Err(invalid!("q1 must lie in (1, 2], got {q1}"));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(invalid!("C must be finite and positive, got {c}"));
    }
    let e = (2.0 - q1) / 2.0;
    if e == 0.0 || a == 0.0 {
        return Ok(c * (1.0 + a));
    }
    let mut b = c;
    for _ in 0..BOOTSTRAP_MAX_ITER {
        let next = c * (1.0 + a * b.powf(e));
        if (next - b).abs() <= 1e-15 * next {
            return Ok(next);
        }
        b = next;
    }
    Err(Error::NumericFailure(format!(
        "bootstrap iteration did not converge in {BOOTSTRAP_MAX_ITER} steps (a={a}, q1={q1}, C={c})"
    )))
}

/// A constant `C'` depending only on `C` and `q1` with
/// `bootstrap_fixed_point(a, q1, C) <= C' (1 + a^(2/q1))` for every `a >= 0`.
pub fn bootstrap_envelope(q1: f64, c: f64) -> f64 {
    (2.0 * c).max((2.0 * c).powf(2.0 / q1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_examples() {
        let r = interpolation_exponents(1.0, 2.0).unwrap();
        assert_eq!((r.theta, r.nu), (0.5, 0.0));
        assert!((r.q_theta - 4.0 / 3.0).abs() < 1e-15);
        let r = interpolation_exponents(1.0, 1.5).unwrap();
        assert_eq!((r.theta, r.nu), (0.5, 0.5));
        assert!((r.q_theta - 1.2).abs() < 1e-15);
        assert!(r.max_residual() < 1e-15);
    }

    #[test]
    fn nu_tends_to_one() {
        let q0 = 1.3;
        let mut last = 0.0;
        for k in 1..20 {
            let r = interpolation_exponents(q0, q0 + 2f64.powi(-k)).unwrap();
            assert!(r.nu > last);
            last = r.nu;
        }
        assert!((1.0 - last).abs() < 1e-5);
    }

    #[test]
    fn exponent_range_checks() {
        assert!(interpolation_exponents(0.9, 1.5).is_err());
        assert!(interpolation_exponents(1.5, 1.5).is_err());
        assert!(interpolation_exponents(1.5, 2.1).is_err());
        assert!(interpolation_exponents(f64::NAN, 2.0).is_err());
    }

    #[test]
    fn bootstrap_examples() {
        assert_eq!(bootstrap_fixed_point(0.0, 1.5, 3.0).unwrap(), 3.0);
        assert_eq!(bootstrap_fixed_point(2.5, 2.0, 3.0).unwrap(), 3.0 * 3.5);
        let b = bootstrap_fixed_point(1.0, 1.5, 1.0).unwrap();
        assert!((b - (1.0 + b.powf(0.25))).abs() < 1e-12);
        assert!((b - 2.221).abs() < 1e-3);
    }

    #[test]
    fn bootstrap_obeys_envelope() {
        for &q1 in &[1.01, 1.2, 1.5, 1.9, 2.0] {
            for &c in &[0.1, 1.0, 7.0] {
                let env = bootstrap_envelope(q1, c);
                for k in -10..=10 {
                    let a = 4f64.powi(k);
                    let b = bootstrap_fixed_point(a, q1, c).unwrap();
                    assert!(b <= env * (1.0 + a.powf(2.0 / q1)) * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn bootstrap_argument_checks() {
        assert!(bootstrap_fixed_point(-1.0, 1.5, 1.0).is_err());
        assert!(bootstrap_fixed_point(1.0, 1.0, 1.0).is_err());
        assert!(bootstrap_fixed_point(1.0, 1.5, 0.0).is_err());
    }
}
