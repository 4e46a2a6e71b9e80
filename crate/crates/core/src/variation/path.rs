use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};

/// An exact rational time stamp.
///
/// Times print as `p/2^q` when the reduced denominator is a power of two,
/// as `p/q` otherwise and as a bare integer when the denominator is one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Time(Rational64);

impl Time {
    pub fn new(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(invalid!("time with zero denominator"));
        }
        Ok(Time(Rational64::new(numer, denom)))
    }

    pub fn integer(n: i64) -> Self {
        Time(Rational64::from_integer(n))
    }

    /// `numer / 2^exp`.
    pub fn dyadic(numer: i64, exp: u32) -> Result<Self> {
        if exp > 62 {
            return Err(invalid!("dyadic exponent {exp} exceeds 62"));
        }
        Time::new(numer, 1i64 << exp)
    }

    pub fn ratio(&self) -> Rational64 {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// True when the time equals `2^k` for some integer `k`.
    pub fn is_power_of_two(&self) -> bool {
        let (p, q) = (*self.0.numer(), *self.0.denom());
        p > 0 && ((q == 1 && (p as u64).is_power_of_two()) || (p == 1 && (q as u64).is_power_of_two()))
    }

    /// The integer `k` with `2^k <= t < 2^(k+1)`; `None` for `t <= 0`.
    pub fn dyadic_block(&self) -> Option<i32> {
        let (p, q) = (*self.0.numer() as i128, *self.0.denom() as i128);
        if p <= 0 {
            return None;
        }
        let bits = |x: i128| 128 - x.leading_zeros() as i32;
        let mut k = bits(p) - bits(q);
        // adjust so that q * 2^k <= p < q * 2^(k+1)
        let scaled = |k: i32| -> (i128, i128) {
            if k >= 0 {
                (p, q << k)
            } else {
                (p << (-k), q)
            }
        };
        loop {
            let (lhs, rhs) = scaled(k);
            if lhs < rhs {
                k -= 1;
                continue;
            }
            let (lhs2, rhs2) = scaled(k + 1);
            if lhs2 >= rhs2 {
                k += 1;
                continue;
            }
            return Some(k);
        }
    }
}

impl std::ops::Sub for Time {
    type Output = Time;
    fn sub(self, rhs: Self) -> Self::Output {
        Time(self.0 - rhs.0)
    }
}

impl std::ops::Mul<i64> for Time {
    type Output = Time;
    fn mul(self, rhs: i64) -> Self::Output {
        Time(self.0 * Rational64::from_integer(rhs))
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, q) = (*self.0.numer(), *self.0.denom());
        if q == 1 {
            write!(f, "{p}")
        } else if (q as u64).is_power_of_two() {
            write!(f, "{p}/2^{}", q.trailing_zeros())
        } else {
            write!(f, "{p}/{q}")
        }
    }
}

impl FromStr for Time {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse_int = |x: &str| -> Result<i64> {
            x.trim()
                .parse::<i64>()
                .map_err(|e| Error::Parse(format!("bad time component {x:?}: {e}")))
        };
        match s.split_once('/') {
            None => Ok(Time::integer(parse_int(s)?)),
            Some((num, den)) => {
                let num = parse_int(num)?;
                let den = den.trim();
                if let Some(exp) = den.strip_prefix("2^") {
                    let exp: u32 = exp
                        .trim()
                        .parse()
                        .map_err(|e| Error::Parse(format!("bad dyadic exponent in {s:?}: {e}")))?;
                    Time::dyadic(num, exp)
                } else {
                    Time::new(num, parse_int(den)?)
                }
            }
        }
    }
}

impl Serialize for Time {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Time {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A finite strictly increasing time grid with complex samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledPath {
    times: Vec<Time>,
    values: Vec<Complex64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPath {
    times: Vec<Time>,
    values: Vec<Complex64>,
}

impl<'de> Deserialize<'de> for SampledPath {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawPath::deserialize(deserializer)?;
        SampledPath::new(raw.times, raw.values).map_err(serde::de::Error::custom)
    }
}

impl SampledPath {
    pub fn new(times: Vec<Time>, values: Vec<Complex64>) -> Result<Self> {
        if times.is_empty() {
            return Err(invalid!("a sampled path needs at least one point"));
        }
        if times.len() != values.len() {
            return Err(invalid!(
                "{} times but {} values",
                times.len(),
                values.len()
            ));
        }
        if let Some(w) = times.windows(2).find(|w| w[0] >= w[1]) {
            return Err(invalid!("times not strictly increasing at {} -> {}", w[0], w[1]));
        }
        if let Some(v) = values.iter().find(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(invalid!("non-finite sample value {v}"));
        }
        Ok(Self { times, values })
    }

    /// Path on the integer times `1..=n`.
    pub fn from_values(values: Vec<Complex64>) -> Result<Self> {
        let times = (1..=values.len() as i64).map(Time::integer).collect();
        Self::new(times, values)
    }

    /// Real-valued path on the integer times `1..=n`.
    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::from_values(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Real-valued path on explicit times.
    pub fn from_real_with_times(times: Vec<Time>, values: &[f64]) -> Result<Self> {
        Self::new(times, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn times(&self) -> &[Time] {
        &self.times
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Restriction to the samples whose time satisfies `keep`; `None` when
    /// nothing survives.
    pub fn restrict<F: Fn(&Time) -> bool>(&self, keep: F) -> Option<SampledPath> {
        let (times, values): (Vec<_>, Vec<_>) = self
            .times
            .iter()
            .zip(&self.values)
            .filter(|(t, _)| keep(t))
            .map(|(t, v)| (*t, *v))
            .unzip();
        if times.is_empty() {
            None
        } else {
            Some(SampledPath { times, values })
        }
    }

    /// Removes the sample at `index`; `None` if that would empty the path.
    pub fn without(&self, index: usize) -> Option<SampledPath> {
        if self.len() <= 1 || index >= self.len() {
            return None;
        }
        let mut p = self.clone();
        p.times.remove(index);
        p.values.remove(index);
        Some(p)
    }
}

/// A weighted finite measure space of paths sharing one time grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldOfPaths {
    atoms: Vec<Atom>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub weight: f64,
    pub path: SampledPath,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawField {
    atoms: Vec<Atom>,
}

impl<'de> Deserialize<'de> for FieldOfPaths {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawField::deserialize(deserializer)?;
        FieldOfPaths::new(raw.atoms).map_err(serde::de::Error::custom)
    }
}

impl FieldOfPaths {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if let Some(first) = atoms.first() {
            for (i, a) in atoms.iter().enumerate() {
                if !(a.weight.is_finite() && a.weight > 0.0) {
                    return Err(invalid!("atom {i} has weight {} (must be positive and finite)", a.weight));
                }
                if a.path.times != first.path.times {
                    return Err(invalid!("atom {i} does not share the time grid of atom 0"));
                }
            }
        }
        Ok(Self { atoms })
    }

    /// Unit-weight field from a list of paths.
    pub fn unit_weights(paths: Vec<SampledPath>) -> Result<Self> {
        Self::new(
            paths
                .into_iter()
                .map(|path| Atom { weight: 1.0, path })
                .collect(),
        )
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

pub(crate) fn is_zero(t: &Time) -> bool {
    t.0.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_parsing_and_display() {
        let t: Time = "5/2^2".parse().unwrap();
        assert_eq!(t, Time::new(5, 4).unwrap());
        assert_eq!(t.to_string(), "5/2^2");
        assert_eq!("3".parse::<Time>().unwrap().to_string(), "3");
        assert_eq!("2/6".parse::<Time>().unwrap().to_string(), "1/3");
        assert_eq!("6/2^1".parse::<Time>().unwrap().to_string(), "3");
        assert!("1/0".parse::<Time>().is_err());
        assert!("x".parse::<Time>().is_err());
    }

    #[test]
    fn dyadic_blocks() {
        let b = |s: &str| s.parse::<Time>().unwrap().dyadic_block();
        assert_eq!(b("1"), Some(0));
        assert_eq!(b("3/2^1"), Some(0));
        assert_eq!(b("2"), Some(1));
        assert_eq!(b("7/2^2"), Some(0));
        assert_eq!(b("1/2^3"), Some(-3));
        assert_eq!(b("3/2^3"), Some(-2));
        assert_eq!(b("1/3"), Some(-2));
        assert_eq!(b("0"), None);
        assert!("1/2^5".parse::<Time>().unwrap().is_power_of_two());
        assert!("8".parse::<Time>().unwrap().is_power_of_two());
        assert!(!"3/2^2".parse::<Time>().unwrap().is_power_of_two());
    }

    #[test]
    fn path_invariants() {
        assert!(SampledPath::from_real(&[]).is_err());
        let times = vec![Time::integer(2), Time::integer(1)];
        assert!(SampledPath::from_real_with_times(times, &[0.0, 1.0]).is_err());
        assert!(SampledPath::new(vec![Time::integer(1)], vec![]).is_err());
    }

    #[test]
    fn path_json_shape() {
        let p = SampledPath::from_real_with_times(
            vec!["1".parse().unwrap(), "5/2^2".parse().unwrap()],
            &[0.0, 1.5],
        )
        .unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"times":["1","5/2^2"],"values":[[0.0,0.0],[1.5,0.0]]}"#);
        let back: SampledPath = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        let bad = r#"{"times":["2","1"],"values":[[0,0],[1,0]]}"#;
        assert!(serde_json::from_str::<SampledPath>(bad).is_err());
    }

    #[test]
    fn field_requires_shared_grid() {
        let a = SampledPath::from_real(&[0.0, 1.0]).unwrap();
        let b = SampledPath::from_real(&[0.0, 1.0, 2.0]).unwrap();
        assert!(FieldOfPaths::unit_weights(vec![a.clone(), b]).is_err());
        assert!(FieldOfPaths::new(vec![Atom { weight: 0.0, path: a }]).is_err());
    }
}
