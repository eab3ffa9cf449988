use fockdeform::{Layout, MomentumGrid, Root};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const ALL_SUITES: [&str; 12] = [
    "inner-functions",
    "fock-core",
    "kernels",
    "deformed-fields",
    "root-independence",
    "chiral-isomorphism",
    "shat-lemma",
    "main-relation",
    "twist-algebra",
    "modular",
    "sharp-momentum",
    "field-equivalence",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot parse config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] fockdeform::Error),
}

/// Grid description: `points` is the total count `M`; `range` bounds the
/// rapidities (`rapidity-uniform`) or `|p|` on each half-line (`geometric-per-halfline`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub mass: f64,
    pub layout: String,
    pub points: usize,
    pub range: [f64; 2],
}

impl GridSpec {
    pub fn build(&self) -> Result<MomentumGrid, ConfigError> {
        let [lo, hi] = self.range;
        if self.points < 2 {
            return Err(ConfigError::Invalid(format!("grid needs M >= 2, got {}", self.points)));
        }
        match self.layout.as_str() {
            "rapidity-uniform" => Ok(MomentumGrid::rapidity_range(self.mass, lo, hi, self.points)?),
            "geometric-per-halfline" => {
                if self.mass != 0.0 {
                    return Err(ConfigError::Invalid("geometric grids are massless".into()));
                }
                if !self.points.is_multiple_of(2) {
                    return Err(ConfigError::Invalid("geometric grids need an even number of points".into()));
                }
                if !(lo > 0.0 && hi >= lo) {
                    return Err(ConfigError::Invalid("geometric range must satisfy 0 < lo <= hi".into()));
                }
                let half = self.points / 2;
                let dlambda = if half > 1 && hi > lo { (hi / lo).ln() / (half - 1) as f64 } else { 1.0 };
                Ok(MomentumGrid::geometric(lo, dlambda, half, half)?)
            }
            other => Err(ConfigError::Invalid(format!("unknown grid layout {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteConfig {
    pub massless: GridSpec,
    pub massive: GridSpec,
    pub truncation: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub roots: Vec<Root>,
    pub random_roots: usize,
    /// Symmetric flip intervals of the sign root `r` used to build `R·r`.
    pub flips: Vec<[f64; 2]>,
    /// Root pairs asserted to satisfy `R1² = R2²`.
    pub equivalent_root_pairs: Vec<[Root; 2]>,
    pub suites: Vec<String>,
    /// Random vectors per operator identity, on top of the dense comparison.
    pub repetitions: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            massless: GridSpec {
                mass: 0.0,
                layout: "geometric-per-halfline".into(),
                points: 6,
                range: [0.5, 2.0],
            },
            massive: GridSpec { mass: 1.0, layout: "rapidity-uniform".into(), points: 6, range: [-1.25, 1.25] },
            truncation: 3,
            tolerance: 1e-10,
            seed: 7,
            roots: vec![serde_json::from_str(r#"{"zeros":[[0.0,1.0]],"sign":1.0}"#).expect("built-in root")],
            random_roots: 5,
            flips: vec![[-1.5, -0.7], [0.7, 1.5]],
            equivalent_root_pairs: Vec::new(),
            suites: ALL_SUITES.iter().map(|s| s.to_string()).collect(),
            repetitions: 3,
        }
    }
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: SuiteConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        SuiteConfig::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.truncation < 2 {
            return Err(ConfigError::Invalid(format!("truncation N must be >= 2, got {}", self.truncation)));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(ConfigError::Invalid("tolerance must be positive".into()));
        }
        let massless = self.massless.build()?;
        if massless.mass() != 0.0 || !matches!(massless.layout(), Layout::Geometric { .. }) {
            return Err(ConfigError::Invalid("the massless grid must be geometric-per-halfline".into()));
        }
        let massive = self.massive.build()?;
        if massive.mass() <= 0.0 {
            return Err(ConfigError::Invalid("the massive grid needs m > 0".into()));
        }
        for root in self.roots.iter().chain(self.equivalent_root_pairs.iter().flatten()) {
            if !root.base().has_symmetric_zeros() {
                return Err(ConfigError::Invalid(format!(
                    "root zeros {:?} are not closed under a -> -conj(a)",
                    root.base().zeros()
                )));
            }
        }
        fockdeform::FlipSet::new(self.flips.iter().map(|&[a, b]| (a, b)).collect())?;
        if self.flips.is_empty() {
            return Err(ConfigError::Invalid("flips must name at least one interval".into()));
        }
        for suite in &self.suites {
            if !ALL_SUITES.contains(&suite.as_str()) {
                return Err(ConfigError::Invalid(format!("unknown suite {suite:?}")));
            }
        }
        if self.repetitions == 0 {
            return Err(ConfigError::Invalid("repetitions must be >= 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid_and_builds_desk_grids() {
        let config = SuiteConfig::default();
        config.validate().unwrap();
        let massless = config.massless.build().unwrap();
        let expected = [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0];
        assert!(massless.points().iter().zip(expected).all(|(a, b)| (a - b).abs() < 1e-12));
        assert_eq!(config.massive.build().unwrap().len(), 6);
    }

    #[test]
    fn json_roundtrip_and_defaults() {
        let config = SuiteConfig::default();
        let text = serde_json::to_string_pretty(&config).unwrap();
        assert_eq!(SuiteConfig::from_json(&text).unwrap(), config);
        let partial = SuiteConfig::from_json(r#"{"seed": 3, "suites": ["kernels"]}"#).unwrap();
        assert_eq!(partial.seed, 3);
        assert_eq!(partial.truncation, 3);
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            r#"{"truncation": 1}"#,
            r#"{"tolerance": 0.0}"#,
            r#"{"suites": ["nope"]}"#,
            r#"{"roots": [{"zeros": [[1.0, 1.0]]}]}"#,
            r#"{"massless": {"mass": 0.0, "layout": "geometric-per-halfline", "points": 5, "range": [0.5, 2.0]}}"#,
            r#"{"massive": {"mass": 1.0, "layout": "rapidity-uniform", "points": 1, "range": [-1.0, 1.0]}}"#,
            r#"{"unknown": 1}"#,
        ] {
            assert!(SuiteConfig::from_json(text).is_err(), "{text}");
        }
    }
}
