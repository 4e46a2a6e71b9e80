use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ext_float;
use crate::averaging::ConvexBodySpec;
use crate::error::{invalid, Error, Result};
use crate::oscillatory::{AmplitudeSpec, PhaseSpec};
use crate::variation::{FieldOfPaths, SampledPath};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    DimensionSweep(DimensionSweep),
    VdcSweep(VdcSweep),
    SymbolEnvelope(SymbolEnvelope),
    BoundaryMeasure(BoundaryMeasure),
    JumpCorpus(JumpCorpus),
    JumpCount(PathQuery),
    Variation(PathQuery),
    JumpSeminorm(FieldQuery),
    Lewko(PathQuery),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::DimensionSweep(_) => "dimension-sweep",
            Self::VdcSweep(_) => "vdc-sweep",
            Self::SymbolEnvelope(_) => "symbol-envelope",
            Self::BoundaryMeasure(_) => "boundary-measure",
            Self::JumpCorpus(_) => "jump-corpus",
            Self::JumpCount(_) => "jump-count",
            Self::Variation(_) => "variation",
            Self::JumpSeminorm(_) => "jump-seminorm",
            Self::Lewko(_) => "lewko",
        }
    }
}

/// Jump quasi-seminorm ratios of cube and convex-body averages of random
/// fields on `Z_M^d`, per dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DimensionSweep {
    pub dims: Vec<usize>,
    pub side: usize,
    pub exponents: Vec<f64>,
    /// Cube half-widths `N`, increasing; the lacunary default is `1, 2, 4`.
    pub scales: Vec<usize>,
    pub fields: usize,
    /// Extra bodies averaged at `t = N` alongside the discrete cube.
    pub bodies: Vec<ConvexBodySpec>,
    /// Largest allowed ratio of any dimension's statistic to the `d = 1` one.
    pub growth_limit: f64,
    pub point_budget: usize,
}

impl Default for DimensionSweep {
    fn default() -> Self {
        Self {
            dims: (1..=6).collect(),
            side: 16,
            exponents: vec![1.501, 2.0, 3.0],
            scales: vec![1, 2, 4],
            fields: 50,
            bodies: Vec::new(),
            growth_limit: 1.5,
            point_budget: 1 << 24,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VdcCase {
    pub id: String,
    pub phase: PhaseSpec,
    pub amplitude: AmplitudeSpec,
    /// Support scale for polynomial phases; absent for the one-variable bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

/// Van der Corput ratios over a corpus, each case swept over phase scales.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VdcSweep {
    pub corpus: Vec<VdcCase>,
    /// Multipliers applied to the phase (to `lambda`, or to every
    /// coefficient of a polynomial).
    pub scales: Vec<f64>,
    /// Ratios above this are flagged.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
}

impl Default for VdcSweep {
    fn default() -> Self {
        Self {
            corpus: Vec::new(),
            scales: vec![1.0],
            constant: None,
        }
    }
}

/// Symbol checks: Littlewood–Paley resolution of identity, off-diagonal
/// decay, discrete-cube symbol constants and the Poisson envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SymbolEnvelope {
    pub dims: Vec<usize>,
    pub frequencies: usize,
    /// Scale truncation `|k| <= k_max` of the resolution of identity.
    pub k_max: i32,
    /// Off-diagonal offsets `|j| <= j_max`.
    pub j_max: i32,
    pub n_max: u32,
}

impl Default for SymbolEnvelope {
    fn default() -> Self {
        Self {
            dims: vec![1, 2, 4],
            frequencies: 1000,
            k_max: 20,
            j_max: 20,
            n_max: 64,
        }
    }
}

/// Monte Carlo boundary-neighbourhood measures over bodies and widths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundaryMeasure {
    pub bodies: Vec<ConvexBodySpec>,
    /// Widths as fractions of each body's diameter.
    pub fractions: Vec<f64>,
    pub samples: usize,
}

impl Default for BoundaryMeasure {
    fn default() -> Self {
        Self {
            bodies: Vec::new(),
            fractions: (2..=8).map(|j| 2f64.powi(-j)).collect(),
            samples: 1_000_000,
        }
    }
}

/// Random-path fuzzing of the pointwise inequalities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JumpCorpus {
    pub paths: usize,
    pub max_len: usize,
    /// Values are drawn from this set when given, Gaussian otherwise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alphabet: Option<Vec<f64>>,
    pub lambdas: Vec<f64>,
    pub exponents: Vec<f64>,
}

impl Default for JumpCorpus {
    fn default() -> Self {
        Self {
            paths: 10_000,
            max_len: 32,
            alphabet: None,
            lambdas: vec![0.5, 1.0, 1.5],
            exponents: vec![1.0, 1.5, 2.0, 3.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathQuery {
    pub paths: Vec<SampledPath>,
    /// Thresholds `lambda` for jump counts, exponents `r` otherwise;
    /// `"inf"` is accepted.
    #[serde(with = "ext_float::vec")]
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldQuery {
    pub field: FieldOfPaths,
    pub exponents: Vec<f64>,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment, seed: u64) -> Self {
        Self {
            experiment,
            seed,
            output: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text).map_err(|e| invalid!("config: {e}"))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Compact JSON with keys in a fixed order and without the output path;
    /// the basis of the config hash.
    pub fn canonical_json(&self) -> String {
        let stripped = Self {
            output: None,
            ..self.clone()
        };
        // round-tripping through Value sorts object keys
        let v = serde_json::to_value(&stripped).expect("config serialises");
        serde_json::to_string(&v).expect("value serialises")
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: &[f64], what: &str| {
            if v.iter().any(|x| !(*x > 0.0)) {
                Err(invalid!("{what} must be positive"))
            } else {
                Ok(())
            }
        };
        match &self.experiment {
            Experiment::DimensionSweep(c) => {
                if c.dims.is_empty() || c.dims.contains(&0) {
                    return Err(invalid!("dims must be a nonempty list of positive dimensions"));
                }
                if c.exponents.iter().any(|p| !(*p > 1.0 && p.is_finite())) {
                    return Err(invalid!("exponents must lie in (1, inf)"));
                }
                if c.scales.is_empty() || c.scales.windows(2).any(|w| w[0] >= w[1]) || c.scales[0] == 0 {
                    return Err(invalid!("scales must be increasing positive half-widths"));
                }
                if 2 * c.scales[c.scales.len() - 1] + 1 > c.side {
                    return Err(invalid!("largest cube 2N+1 exceeds the period {}", c.side));
                }
                for &d in &c.dims {
                    let pts = (c.side as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
                    if pts > c.point_budget as u128 {
                        return Err(invalid!("{}^{d} lattice points exceed the budget {}", c.side, c.point_budget));
                    }
                }
                for b in &c.bodies {
                    b.validate()?;
                }
                positive(&[c.growth_limit], "growth limit")
            }
            Experiment::VdcSweep(c) => {
                positive(&c.scales, "phase scales")?;
                for case in &c.corpus {
                    case.phase.validate()?;
                    case.amplitude.factors()?;
                }
                Ok(())
            }
            Experiment::SymbolEnvelope(c) => {
                if c.dims.contains(&0) || c.frequencies == 0 || c.n_max == 0 || c.k_max < 0 || c.j_max < 0 {
                    return Err(invalid!("symbol checks need positive dims, frequencies and N_max"));
                }
                Ok(())
            }
            Experiment::BoundaryMeasure(c) => {
                for b in &c.bodies {
                    b.validate()?;
                }
                if c.fractions.iter().any(|f| !(*f > 0.0 && *f <= 1.0)) {
                    return Err(invalid!("width fractions must lie in (0, 1]"));
                }
                if c.samples == 0 {
                    return Err(invalid!("need at least one sample"));
                }
                Ok(())
            }
            Experiment::JumpCorpus(c) => {
                if c.max_len < 2 {
                    return Err(invalid!("corpus paths need length at least 2"));
                }
                positive(&c.lambdas, "thresholds")?;
                if c.exponents.iter().any(|r| !(*r >= 1.0 && r.is_finite())) {
                    return Err(invalid!("corpus exponents must lie in [1, inf)"));
                }
                Ok(())
            }
            Experiment::JumpCount(q) | Experiment::Variation(q) | Experiment::Lewko(q) => {
                positive(&q.values, "thresholds and exponents")
            }
            Experiment::JumpSeminorm(q) => {
                if q.exponents.iter().any(|p| !(*p > 1.0 && p.is_finite())) {
                    return Err(invalid!("exponents must lie in (1, inf)"));
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let c = ExperimentConfig::from_json(r#"{"experiment":{"kind":"dimension-sweep","dims":[1,2]},"seed":4}"#).unwrap();
        let Experiment::DimensionSweep(d) = &c.experiment else { panic!() };
        assert_eq!(d.side, 16);
        assert_eq!(d.dims, vec![1, 2]);
        assert_eq!(c.seed, 4);
    }

    #[test]
    fn unknown_fields_and_bad_values_are_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"experiment":{"kind":"dimension-sweep","dimz":[1]}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment":{"kind":"nope"}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment":{"kind":"jump-corpus"},"extra":1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment":{"kind":"dimension-sweep","dims":[7]}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment":{"kind":"dimension-sweep","scales":[1,8]}}"#).is_err());
    }

    #[test]
    fn canonical_json_is_stable() {
        let a = ExperimentConfig::from_json(r#"{"seed":1,"experiment":{"fields":3,"kind":"dimension-sweep"}}"#).unwrap();
        let b = ExperimentConfig::from_json(r#"{"experiment":{"kind":"dimension-sweep","fields":3},"seed":1}"#).unwrap();
        assert_eq!(a.canonical_json(), b.canonical_json());
        assert_eq!(ExperimentConfig::from_json(&a.canonical_json()).unwrap(), a);
    }

    #[test]
    fn path_queries_accept_infinite_exponents() {
        let c = ExperimentConfig::from_json(
            r#"{"experiment":{"kind":"variation","paths":[{"times":["1","2","3"],"values":[[0,0],[3,0],[1,0]]}],"values":[2,"inf"]}}"#,
        )
        .unwrap();
        let Experiment::Variation(q) = &c.experiment else { panic!() };
        assert_eq!(q.values, vec![2.0, f64::INFINITY]);
    }
}
