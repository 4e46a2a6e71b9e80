use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::jump::count_chain;
use super::path::SampledPath;
use crate::error::{invalid, Result};

/// The three terms of the long/short jump decomposition at one threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LongShort {
    /// `lambda N_{lambda/3}` over the times `2^k`, square-rooted count.
    pub long: f64,
    /// Square function of `lambda N_lambda` over dyadic blocks `[2^k, 2^(k+1))`.
    pub short: f64,
    /// `lambda N_lambda^(1/2)` over the whole path.
    pub lhs: f64,
}

impl LongShort {
    /// `lhs / (long + short)`; zero when both sides vanish.
    pub fn ratio(&self) -> f64 {
        let denom = self.long + self.short;
        if self.lhs == 0.0 {
            0.0
        } else if denom == 0.0 {
            f64::INFINITY
        } else {
            self.lhs / denom
        }
    }
}

/// Splits the jumps of `path` at threshold `lambda` into long jumps between
/// dyadic times and short jumps inside dyadic blocks.
///
/// Samples at nonpositive times belong to neither restriction.
pub fn long_short_split(path: &SampledPath, lambda: f64) -> Result<LongShort> {
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(invalid!("jump threshold must be positive, got {lambda}"));
    }
    let values = path.values();
    let lhs = lambda * (count_chain(values, lambda) as f64).sqrt();

    let mut dyadic = Vec::new();
    let mut blocks: BTreeMap<i32, Vec<_>> = BTreeMap::new();
    for (t, v) in path.times().iter().zip(values) {
        if t.is_power_of_two() {
            dyadic.push(*v);
        }
        if let Some(k) = t.dyadic_block() {
            blocks.entry(k).or_default().push(*v);
        }
    }
    let long = lambda * (count_chain(&dyadic, lambda / 3.0) as f64).sqrt();
    let short_count: usize = blocks.values().map(|b| count_chain(b, lambda)).sum();
    let short = lambda * (short_count as f64).sqrt();
    Ok(LongShort { long, short, lhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variation::Time;

    #[test]
    fn worked_example() {
        let times = vec![
            Time::integer(1),
            Time::dyadic(5, 2).unwrap(),
            Time::dyadic(3, 1).unwrap(),
            Time::integer(2),
        ];
        let p = SampledPath::from_real_with_times(times, &[0.0, 1.0, 0.0, 1.0]).unwrap();
        let s = long_short_split(&p, 1.0).unwrap();
        assert_eq!(s.long, 1.0);
        assert!((s.short - 2f64.sqrt()).abs() < 1e-15);
        assert!((s.lhs - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn dyadic_support_has_no_short_jumps() {
        let times = (0..6).map(|k| Time::integer(1 << k)).collect();
        let p = SampledPath::from_real_with_times(times, &[0.0, 2.0, -1.0, 0.5, 3.0, 3.0]).unwrap();
        for lambda in [0.3, 1.0, 2.5] {
            let s = long_short_split(&p, lambda).unwrap();
            assert_eq!(s.short, 0.0);
            assert!(s.lhs <= s.long);
        }
    }

    #[test]
    fn nonpositive_times_are_ignored_by_both_restrictions() {
        let times = vec![Time::integer(-1), Time::integer(0), Time::integer(1)];
        let p = SampledPath::from_real_with_times(times, &[5.0, 0.0, 5.0]).unwrap();
        let s = long_short_split(&p, 1.0).unwrap();
        assert_eq!((s.long, s.short), (0.0, 0.0));
        assert_eq!(s.ratio(), f64::INFINITY);
        assert!(long_short_split(&p, 0.0).is_err());
    }
}
