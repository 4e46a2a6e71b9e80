use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyTerm {
    pub alpha: Vec<u32>,
    pub coef: f64,
}

impl PolyTerm {
    pub fn order(&self) -> u32 {
        self.alpha.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PhaseSpec {
    /// `lambda (x - center)^order / order!` on `[a, b]`, whose `order`-th
    /// derivative is identically `lambda`.
    Monomial {
        lambda: f64,
        order: u32,
        #[serde(default)]
        center: f64,
        a: f64,
        b: f64,
    },
    /// `sum_alpha coef_alpha x^alpha` in `alpha.len()` variables.
    Polynomial { terms: Vec<PolyTerm> },
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

impl PhaseSpec {
    pub fn monomial(lambda: f64, order: u32, a: f64, b: f64) -> Self {
        Self::Monomial {
            lambda,
            order,
            center: 0.0,
            a,
            b,
        }
    }

    pub fn polynomial(terms: impl IntoIterator<Item = (Vec<u32>, f64)>) -> Self {
        Self::Polynomial {
            terms: terms.into_iter().map(|(alpha, coef)| PolyTerm { alpha, coef }).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Monomial {
                lambda,
                order,
                center,
                a,
                b,
            } => {
                if !(lambda.is_finite() && *lambda > 0.0) {
                    return Err(invalid!("phase derivative bound must be positive, got {lambda}"));
                }
                if *order == 0 {
                    return Err(invalid!("derivative order must be at least 1"));
                }
                if !(a.is_finite() && b.is_finite() && center.is_finite() && a < b) {
                    return Err(invalid!("phase domain [{a}, {b}] must be a finite proper interval"));
                }
                Ok(())
            }
            Self::Polynomial { terms } => {
                let k = self.vars();
                if k == 0 {
                    return Err(invalid!("polynomial phase needs at least one term with variables"));
                }
                if terms.iter().any(|t| t.alpha.len() != k || !t.coef.is_finite()) {
                    return Err(invalid!("every term needs a {k}-variable multi-index and finite coefficient"));
                }
                Ok(())
            }
        }
    }

    pub fn vars(&self) -> usize {
        match self {
            Self::Monomial { .. } => 1,
            Self::Polynomial { terms } => terms.first().map_or(0, |t| t.alpha.len()),
        }
    }

    pub fn degree(&self) -> u32 {
        match self {
            Self::Monomial { order, .. } => *order,
            Self::Polynomial { terms } => terms
                .iter()
                .filter(|t| t.coef != 0.0)
                .map(PolyTerm::order)
                .max()
                .unwrap_or(0),
        }
    }

    /// `sum_(|alpha| >= 1) r^|alpha| |coef_alpha|`.
    pub fn scale_size(&self, r: f64) -> f64 {
        match self {
            Self::Monomial { lambda, order, center, .. } => {
                // expand lambda (x - c)^k / k! binomially
                let k = *order;
                let mut total = 0.0;
                let mut binom = 1.0;
                for j in 0..=k {
                    if j >= 1 {
                        total += r.powi(j as i32) * binom * center.abs().powi((k - j) as i32);
                    }
                    binom = binom * f64::from(k - j) / f64::from(j + 1);
                }
                lambda / factorial(k) * total
            }
            Self::Polynomial { terms } => terms
                .iter()
                .filter(|t| t.order() >= 1)
                .map(|t| r.powi(t.order() as i32) * t.coef.abs())
                .sum(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Self::Monomial {
                lambda, order, center, ..
            } => lambda * (x[0] - center).powi(*order as i32) / factorial(*order),
            Self::Polynomial { terms } => terms
                .iter()
                .map(|t| {
                    t.coef
                        * t.alpha
                            .iter()
                            .zip(x)
                            .map(|(&a, &xi)| xi.powi(a as i32))
                            .product::<f64>()
                })
                .sum(),
        }
    }

    /// Upper bound for `|d phase / dx_j|` on the box `prod [lo_i, hi_i]`.
    pub fn slope_bound(&self, j: usize, bbox: &[(f64, f64)]) -> f64 {
        match self {
            Self::Monomial {
                lambda, order, center, ..
            } => {
                let (lo, hi) = bbox[0];
                let m = (lo - center).abs().max((hi - center).abs());
                lambda * m.powi(*order as i32 - 1) / factorial(order - 1)
            }
            Self::Polynomial { terms } => {
                let m: Vec<f64> = bbox.iter().map(|(lo, hi)| lo.abs().max(hi.abs())).collect();
                terms
                    .iter()
                    .filter(|t| t.alpha[j] > 0)
                    .map(|t| {
                        let mut v = t.coef.abs() * f64::from(t.alpha[j]);
                        for (i, &a) in t.alpha.iter().enumerate() {
                            let e = if i == j { a - 1 } else { a };
                            v *= m[i].powi(e as i32);
                        }
                        v
                    })
                    .sum()
            }
        }
    }

    /// The phase `x -> P(r x)`.
    pub fn rescale(&self, r: f64) -> Self {
        match self {
            Self::Monomial {
                lambda,
                order,
                center,
                a,
                b,
            } => Self::Monomial {
                lambda: lambda * r.powi(*order as i32),
                order: *order,
                center: center / r,
                a: a / r,
                b: b / r,
            },
            Self::Polynomial { terms } => Self::Polynomial {
                terms: terms
                    .iter()
                    .map(|t| PolyTerm {
                        alpha: t.alpha.clone(),
                        coef: t.coef * r.powi(t.order() as i32),
                    })
                    .collect(),
            },
        }
    }
}
