use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BodyKind {
    /// Unit ball of the `l^q` norm, `q in [1, inf]` (`q = inf` is spelled
    /// `f64::INFINITY`, or the string `"inf"` in JSON).
    LqBall {
        #[serde(with = "float_or_inf")]
        q: f64,
    },
    /// `prod_i (-h_i, h_i)`, or `prod_i (lo_i, hi_i)` when `lower` is given.
    /// Boxes that are not centred at the origin are experimental: they are
    /// only supported where the origin lies strictly inside.
    Box {
        half_widths: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lower: Option<Vec<f64>>,
    },
}

/// An open convex body in `R^d` containing the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexBodySpec {
    #[serde(flatten)]
    pub kind: BodyKind,
    pub dim: usize,
}

impl ConvexBodySpec {
    pub fn lq_ball(q: f64, dim: usize) -> Result<Self> {
        let b = Self {
            kind: BodyKind::LqBall { q },
            dim,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn cube(dim: usize) -> Self {
        Self {
            kind: BodyKind::LqBall { q: f64::INFINITY },
            dim,
        }
    }

    pub fn symmetric_box(half_widths: Vec<f64>) -> Result<Self> {
        let b = Self {
            dim: half_widths.len(),
            kind: BodyKind::Box {
                half_widths,
                lower: None,
            },
        };
        b.validate()?;
        Ok(b)
    }

    /// `prod_i (lower_i, upper_i)` with `lower_i < 0 < upper_i`.
    pub fn offset_box(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let b = Self {
            dim: upper.len(),
            kind: BodyKind::Box {
                half_widths: upper,
                lower: Some(lower),
            },
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(invalid!("convex body needs dimension >= 1"));
        }
        match &self.kind {
            BodyKind::LqBall { q } => {
                if q.is_nan() || *q < 1.0 {
                    return Err(invalid!("l^q ball needs q in [1, inf], got {q}"));
                }
            }
            BodyKind::Box { half_widths, lower } => {
                if half_widths.len() != self.dim {
                    return Err(invalid!("box has {} half-widths for dimension {}", half_widths.len(), self.dim));
                }
                if half_widths.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
                    return Err(invalid!("box extents must be positive and finite"));
                }
                if let Some(lo) = lower {
                    if lo.len() != self.dim || lo.iter().any(|l| !(l.is_finite() && *l < 0.0)) {
                        return Err(invalid!("offset box needs negative finite lower corners, one per axis"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_symmetric(&self) -> bool {
        match &self.kind {
            BodyKind::LqBall { .. } => true,
            BodyKind::Box { half_widths, lower } => lower
                .as_ref()
                .is_none_or(|lo| lo.iter().zip(half_widths).all(|(l, h)| -l == *h)),
        }
    }

    fn bounds(&self, i: usize) -> (f64, f64) {
        match &self.kind {
            BodyKind::LqBall { .. } => (-1.0, 1.0),
            BodyKind::Box { half_widths, lower } => {
                let hi = half_widths[i];
                (lower.as_ref().map_or(-hi, |lo| lo[i]), hi)
            }
        }
    }

    /// Axis-aligned bounding box `(lower, upper)`.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        (0..self.dim).map(|i| self.bounds(i)).unzip()
    }

    /// Minkowski functional: `inf { s > 0 : x in s G }`.
    pub fn gauge(&self, x: &[f64]) -> f64 {
        match &self.kind {
            BodyKind::LqBall { q } => lq_norm(x, *q),
            BodyKind::Box { .. } => x
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    let (lo, hi) = self.bounds(i);
                    if v >= 0.0 {
                        v / hi
                    } else {
                        v / lo
                    }
                })
                .fold(0.0, f64::max),
        }
    }

    /// Membership in the open body.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.gauge(x) < 1.0
    }

    /// Distance from the origin to the boundary along the unit vector `u`.
    pub fn radial(&self, u: &[f64]) -> f64 {
        1.0 / self.gauge(u)
    }

    pub fn volume(&self) -> f64 {
        match &self.kind {
            BodyKind::LqBall { q } => {
                let d = self.dim as f64;
                if q.is_infinite() {
                    2f64.powi(self.dim as i32)
                } else {
                    (d * (2.0f64.ln() + ln_gamma(1.0 + 1.0 / q)) - ln_gamma(1.0 + d / q)).exp()
                }
            }
            BodyKind::Box { .. } => (0..self.dim)
                .map(|i| {
                    let (lo, hi) = self.bounds(i);
                    hi - lo
                })
                .product(),
        }
    }

    /// Largest Euclidean norm of a point of the closed body.
    pub fn circumradius(&self) -> f64 {
        match &self.kind {
            BodyKind::LqBall { q } => {
                if *q <= 2.0 {
                    1.0
                } else {
                    (self.dim as f64).powf(0.5 - 1.0 / q)
                }
            }
            BodyKind::Box { .. } => (0..self.dim)
                .map(|i| {
                    let (lo, hi) = self.bounds(i);
                    lo.abs().max(hi).powi(2)
                })
                .sum::<f64>()
                .sqrt(),
        }
    }

    /// Largest Euclidean ball around the origin inside the body.
    pub fn inradius(&self) -> f64 {
        match &self.kind {
            BodyKind::LqBall { q } => {
                if *q >= 2.0 {
                    1.0
                } else {
                    (self.dim as f64).powf(1.0 / q - 0.5)
                        .recip()
                }
            }
            BodyKind::Box { .. } => (0..self.dim)
                .map(|i| {
                    let (lo, hi) = self.bounds(i);
                    lo.abs().min(hi)
                })
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Euclidean diameter.
    pub fn diameter(&self) -> f64 {
        match &self.kind {
            BodyKind::LqBall { .. } => 2.0 * self.circumradius(),
            BodyKind::Box { .. } => (0..self.dim)
                .map(|i| {
                    let (lo, hi) = self.bounds(i);
                    (hi - lo).powi(2)
                })
                .sum::<f64>()
                .sqrt(),
        }
    }

    /// Angles in `[0, 2 pi)` where the planar boundary is not smooth (or,
    /// for `l^q` balls, where the norm loses smoothness); empty unless
    /// `dim == 2`.
    pub fn kink_angles(&self) -> Vec<f64> {
        use std::f64::consts::PI;
        if self.dim != 2 {
            return Vec::new();
        }
        let mut out: Vec<f64> = match &self.kind {
            BodyKind::LqBall { q } => {
                let mut v = vec![0.0, PI / 2.0, PI, 1.5 * PI];
                if q.is_infinite() || *q > 2.0 {
                    v.extend([PI / 4.0, 0.75 * PI, 1.25 * PI, 1.75 * PI]);
                }
                v
            }
            BodyKind::Box { .. } => {
                let (lo, hi) = self.bounding_box();
                let mut v = vec![0.0, PI / 2.0, PI, 1.5 * PI];
                for &x in &[lo[0], hi[0]] {
                    for &y in &[lo[1], hi[1]] {
                        v.push(y.atan2(x).rem_euclid(2.0 * PI));
                    }
                }
                v
            }
        };
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        out
    }
}

pub fn lq_norm(x: &[f64], q: f64) -> f64 {
    if q.is_infinite() {
        x.iter().fold(0.0, |m, v| m.max(v.abs()))
    } else if q == 1.0 {
        x.iter().map(|v| v.abs()).sum()
    } else if q == 2.0 {
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    } else {
        let m = x.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        if m == 0.0 {
            return 0.0;
        }
        m * x.iter().map(|v| (v.abs() / m).powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

mod float_or_inf {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Text(t) if t == "inf" || t == "infinity" => Ok(f64::INFINITY),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {t}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn volumes() {
        assert!((ConvexBodySpec::lq_ball(2.0, 2).unwrap().volume() - PI).abs() < 1e-12);
        assert!((ConvexBodySpec::lq_ball(2.0, 3).unwrap().volume() - 4.0 * PI / 3.0).abs() < 1e-12);
        assert!((ConvexBodySpec::lq_ball(1.0, 3).unwrap().volume() - 8.0 / 6.0).abs() < 1e-12);
        assert_eq!(ConvexBodySpec::cube(4).volume(), 16.0);
        let b = ConvexBodySpec::offset_box(vec![-1.0, -0.5], vec![2.0, 0.5]).unwrap();
        assert_eq!(b.volume(), 3.0);
        assert!(!b.is_symmetric());
    }

    #[test]
    fn gauges_and_radii() {
        let l1 = ConvexBodySpec::lq_ball(1.0, 2).unwrap();
        assert_eq!(l1.gauge(&[0.5, -0.25]), 0.75);
        assert!(l1.contains(&[0.5, 0.25]) && !l1.contains(&[0.5, 0.5]));
        assert!((l1.inradius() - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        let linf = ConvexBodySpec::cube(3);
        assert!((linf.circumradius() - 3f64.sqrt()).abs() < 1e-15);
        assert!((linf.diameter() - 2.0 * 3f64.sqrt()).abs() < 1e-15);
        let b = ConvexBodySpec::offset_box(vec![-1.0], vec![3.0]).unwrap();
        assert_eq!(b.gauge(&[1.5]), 0.5);
        assert_eq!(b.gauge(&[-0.5]), 0.5);
        assert_eq!(b.diameter(), 4.0);
        let l3 = ConvexBodySpec::lq_ball(3.0, 2).unwrap();
        assert!((lq_norm(&[1.0, 1.0], 3.0) - 2f64.powf(1.0 / 3.0)).abs() < 1e-15);
        assert!((l3.radial(&[1.0, 0.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_degenerate_bodies() {
        assert!(ConvexBodySpec::lq_ball(0.5, 2).is_err());
        assert!(ConvexBodySpec::symmetric_box(vec![1.0, 0.0]).is_err());
        assert!(ConvexBodySpec::offset_box(vec![0.0], vec![1.0]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let b = ConvexBodySpec::cube(2);
        let text = serde_json::to_string(&b).unwrap();
        assert_eq!(text, r#"{"kind":"lq-ball","q":"inf","dim":2}"#);
        assert_eq!(serde_json::from_str::<ConvexBodySpec>(&text).unwrap(), b);
        let text = r#"{"kind":"box","half_widths":[1.0,2.0],"dim":2}"#;
        let b: ConvexBodySpec = serde_json::from_str(text).unwrap();
        assert_eq!(b.volume(), 8.0);
    }
}
