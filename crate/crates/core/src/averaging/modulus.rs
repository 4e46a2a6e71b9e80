use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A modulus of continuity `omega : [0, inf) -> [0, inf)`: vanishing at 0,
/// nondecreasing and subadditive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModulusOfContinuity {
    Zero,
    /// `c t^theta` with `theta in (0, 1]`.
    Power { c: f64, theta: f64 },
    /// Piecewise-linear interpolation through `(0, 0)` and the listed points,
    /// constant after the last one.
    Table { points: Vec<(f64, f64)> },
    /// `(1 + ln(1 + 1/t))^(-alpha)`, a modulus flatter than every power.
    LogDecay { alpha: f64 },
    Sum { terms: Vec<ModulusOfContinuity> },
    /// `outer(inner(t))`.
    Compose {
        outer: Box<ModulusOfContinuity>,
        inner: Box<ModulusOfContinuity>,
    },
    /// `base(t)^theta`.
    PowerOf { base: Box<ModulusOfContinuity>, theta: f64 },
    /// `base(t^theta)`.
    InnerPower { base: Box<ModulusOfContinuity>, theta: f64 },
}

impl ModulusOfContinuity {
    pub fn power(c: f64, theta: f64) -> Self {
        Self::Power { c, theta }
    }

    pub fn linear(c: f64) -> Self {
        Self::Power { c, theta: 1.0 }
    }

    pub fn log_decay(alpha: f64) -> Self {
        Self::LogDecay { alpha }
    }

    pub fn table(points: Vec<(f64, f64)>) -> Result<Self> {
        let m = Self::Table { points };
        m.check_parameters()?;
        Ok(m)
    }

    pub fn sum(terms: Vec<ModulusOfContinuity>) -> Self {
        Self::Sum { terms }
    }

    pub fn compose(outer: ModulusOfContinuity, inner: ModulusOfContinuity) -> Self {
        Self::Compose {
            outer: Box::new(outer),
            inner: Box::new(inner),
        }
    }

    /// `self^theta`.
    pub fn raised(self, theta: f64) -> Self {
        Self::PowerOf {
            base: Box::new(self),
            theta,
        }
    }

    /// `self(t^theta)`.
    pub fn precomposed_power(self, theta: f64) -> Self {
        Self::InnerPower {
            base: Box::new(self),
            theta,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            Self::Zero => 0.0,
            Self::Power { c, theta } => c * t.powf(*theta),
            Self::Table { points } => table_eval(points, t),
            Self::LogDecay { alpha } => (1.0 + (1.0 / t).ln_1p()).powf(-alpha),
            Self::Sum { terms } => terms.iter().map(|m| m.eval(t)).sum(),
            Self::Compose { outer, inner } => outer.eval(inner.eval(t)),
            Self::PowerOf { base, theta } => base.eval(t).powf(*theta),
            Self::InnerPower { base, theta } => base.eval(t.powf(*theta)),
        }
    }

    /// `omega(e^(-u))`, evaluated without forming `e^(-u)` where the form
    /// allows it so that very small arguments keep full relative accuracy.
    pub fn eval_exp(&self, u: f64) -> f64 {
        match self {
            Self::Power { c, theta } => c * (-theta * u).exp(),
            Self::LogDecay { alpha } => {
                // ln(1 + e^u) = u + ln(1 + e^-u) for u > 0
                let l = if u > 0.0 { u + (-u).exp().ln_1p() } else { u.exp().ln_1p() };
                (1.0 + l).powf(-alpha)
            }
            Self::Sum { terms } => terms.iter().map(|m| m.eval_exp(u)).sum(),
            Self::PowerOf { base, theta } => base.eval_exp(u).powf(*theta),
            Self::InnerPower { base, theta } => base.eval_exp(theta * u),
            _ => self.eval((-u).exp()),
        }
    }

    /// Rejects parameters outside the admissible ranges of each form.
    pub fn check_parameters(&self) -> Result<()> {
        match self {
            Self::Zero => Ok(()),
            Self::Power { c, theta } => {
                if !(c.is_finite() && *c >= 0.0) {
                    return Err(invalid!("power modulus needs c >= 0, got {c}"));
                }
                if !(*theta > 0.0 && *theta <= 1.0) {
                    return Err(invalid!("power modulus needs theta in (0, 1], got {theta}"));
                }
                Ok(())
            }
            Self::Table { points } => {
                let mut last = (0.0, 0.0);
                for &(t, w) in points {
                    if !(t.is_finite() && w.is_finite() && t > last.0 && w >= last.1) {
                        return Err(invalid!(
                            "table modulus needs increasing arguments and nondecreasing values"
                        ));
                    }
                    last = (t, w);
                }
                Ok(())
            }
            Self::LogDecay { alpha } => {
                if !(alpha.is_finite() && *alpha > 0.0) {
                    return Err(invalid!("log-decay modulus needs alpha > 0, got {alpha}"));
                }
                Ok(())
            }
            Self::Sum { terms } => terms.iter().try_for_each(|m| m.check_parameters()),
            Self::Compose { outer, inner } => {
                outer.check_parameters()?;
                inner.check_parameters()
            }
            Self::PowerOf { base, theta } | Self::InnerPower { base, theta } => {
                if !(*theta > 0.0 && *theta <= 1.0) {
                    return Err(invalid!("exponent must lie in (0, 1], got {theta}"));
                }
                base.check_parameters()
            }
        }
    }

    /// Largest violation of monotonicity and subadditivity on a log grid of
    /// `n` points in `[lo, hi]`; zero for a genuine modulus.
    pub fn violation(&self, lo: f64, hi: f64, n: usize) -> f64 {
        let grid = crate::numeric::log_space(lo, hi, n);
        let vals: Vec<f64> = grid.iter().map(|&t| self.eval(t)).collect();
        let mut worst: f64 = self.eval(0.0).abs();
        for w in vals.windows(2) {
            worst = worst.max(w[0] - w[1]);
        }
        for (i, &s) in grid.iter().enumerate() {
            for (j, &t) in grid.iter().enumerate().skip(i) {
                let excess = self.eval(s + t) - (vals[i] + vals[j]);
                worst = worst.max(excess);
            }
        }
        worst
    }

    /// Parameter check plus the monotonicity/subadditivity grid test.
    pub fn validate(&self) -> Result<()> {
        self.check_parameters()?;
        let v = self.violation(1e-8, 1e4, 97);
        if v > 1e-12 * (1.0 + self.eval(2e4)) {
            return Err(invalid!("not a modulus of continuity: grid violation {v:e}"));
        }
        Ok(())
    }
}

fn table_eval(points: &[(f64, f64)], t: f64) -> f64 {
    let mut prev = (0.0, 0.0);
    for &(x, y) in points {
        if t <= x {
            return prev.1 + (y - prev.1) * (t - prev.0) / (x - prev.0);
        }
        prev = (x, y);
    }
    prev.1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_forms_are_moduli() {
        let forms = [
            ModulusOfContinuity::Zero,
            ModulusOfContinuity::power(2.0, 1.0),
            ModulusOfContinuity::power(1.0, 0.3),
            ModulusOfContinuity::log_decay(1.5),
            ModulusOfContinuity::table(vec![(1.0, 1.0), (3.0, 2.0), (10.0, 2.5)]).unwrap(),
            ModulusOfContinuity::sum(vec![
                ModulusOfContinuity::power(1.0, 0.5),
                ModulusOfContinuity::log_decay(2.0),
            ]),
        ];
        for m in forms {
            m.validate().unwrap();
            assert_eq!(m.eval(0.0), 0.0);
        }
    }

    #[test]
    fn closure_under_powers_and_composition() {
        let base = ModulusOfContinuity::table(vec![(0.5, 1.0), (2.0, 1.5)]).unwrap();
        for theta in [0.2, 0.5, 0.9] {
            base.clone().raised(theta).validate().unwrap();
            base.clone().precomposed_power(theta).validate().unwrap();
        }
        let c = ModulusOfContinuity::compose(ModulusOfContinuity::power(1.0, 0.5), base);
        c.validate().unwrap();
    }

    #[test]
    fn log_domain_evaluation_agrees() {
        let forms = [
            ModulusOfContinuity::power(3.0, 0.7),
            ModulusOfContinuity::log_decay(2.5),
            ModulusOfContinuity::power(1.0, 1.0).raised(0.5).precomposed_power(0.5),
        ];
        for m in forms {
            for u in [-2.0, 0.0, 0.5, 3.0, 20.0] {
                let a = m.eval_exp(u);
                let b = m.eval((-u).exp());
                assert!((a - b).abs() <= 1e-13 * b.max(1e-300), "{m:?} {u}");
            }
        }
        // far below the smallest positive double
        let p = ModulusOfContinuity::power(1.0, 0.1);
        assert!((p.eval_exp(8000.0) - (-800.0f64).exp()).abs() < 1e-300);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ModulusOfContinuity::power(1.0, 1.5).validate().is_err());
        assert!(ModulusOfContinuity::table(vec![(1.0, 2.0), (0.5, 3.0)]).is_err());
        // t^2 is not subadditive
        let sq = ModulusOfContinuity::InnerPower {
            base: Box::new(ModulusOfContinuity::power(1.0, 1.0)),
            theta: 1.0,
        };
        sq.validate().unwrap();
        let convex = ModulusOfContinuity::table(vec![(1.0, 0.1), (2.0, 5.0)]).unwrap();
        assert!(convex.validate().is_err());
    }

    #[test]
    fn json_shape() {
        let m = ModulusOfContinuity::sum(vec![ModulusOfContinuity::power(2.0, 1.0), ModulusOfContinuity::Zero]);
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(
            text,
            r#"{"form":"sum","terms":[{"form":"power","c":2.0,"theta":1.0},{"form":"zero"}]}"#
        );
        let back: ModulusOfContinuity = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }
}
