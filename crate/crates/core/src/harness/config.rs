use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::HarnessError;
use crate::channels::ChannelKind;
use crate::entropy::undersampling_guard;
use crate::process::{ProcessSpec, SpecFile};
use crate::rng::Seed;
use crate::word::Symbol;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    #[default]
    Nats,
    Bits,
}

impl Unit {
    pub fn convert(self, nats: f64) -> f64 {
        match self {
            Unit::Nats => nats,
            Unit::Bits => nats / std::f64::consts::LN_2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Unit::Nats => "nats",
            Unit::Bits => "bits",
        }
    }
}

impl std::str::FromStr for Unit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "nats" => Ok(Unit::Nats),
            "bits" => Ok(Unit::Bits),
            other => Err(format!("unknown unit {other:?} (expected nats or bits)")),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

/// One experiment, as read from a TOML file.
///
/// ```toml
/// spec_file = "markov.toml"     # or an inline [process] table
/// n = 1000000
/// m = 10
/// eps = [0.01, 0.02, 0.05, 0.1]
/// seeds = [1, 2, 3]
/// channel = "substitution"
///
/// [output]
/// csv = "continuity.csv"
/// ```
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub spec_file: Option<PathBuf>,
    #[serde(default)]
    pub process: Option<SpecFile>,
    pub n: usize,
    pub m: usize,
    #[serde(default)]
    pub eps: Vec<f64>,
    pub seeds: Vec<Seed>,
    #[serde(default = "default_channel")]
    pub channel: ChannelKind,
    #[serde(default)]
    pub unit: Unit,
    /// Added to the analytic budget in the hard pass criterion, nats.
    #[serde(default)]
    pub slack: f64,
    /// Empirical bound on `|Δh|` for the soft pass criterion, nats.
    #[serde(default = "default_soft_tolerance")]
    pub soft_tolerance: f64,
    /// Block-length growth parameter of quasi-generic paths.
    #[serde(default = "default_schedule")]
    pub schedule: usize,
    /// Marked letters for induced-system experiments.
    #[serde(default = "default_mark")]
    pub mark: Vec<Symbol>,
    #[serde(default = "default_r_max")]
    pub r_max: usize,
    #[serde(default)]
    pub output: OutputPaths,
    /// Directory that relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_channel() -> ChannelKind {
    ChannelKind::Substitution
}

fn default_soft_tolerance() -> f64 {
    0.1
}

fn default_schedule() -> usize {
    100
}

fn default_mark() -> Vec<Symbol> {
    vec![1]
}

fn default_r_max() -> usize {
    32
}

impl ExperimentConfig {
    /// A config with defaults for everything but the essentials.
    pub fn new(n: usize, m: usize, seeds: impl IntoIterator<Item = u64>) -> Self {
        ExperimentConfig {
            spec_file: None,
            process: None,
            n,
            m,
            eps: Vec::new(),
            seeds: seeds.into_iter().map(Seed).collect(),
            channel: default_channel(),
            unit: Unit::Nats,
            slack: 0.0,
            soft_tolerance: default_soft_tolerance(),
            schedule: default_schedule(),
            mark: default_mark(),
            r_max: default_r_max(),
            output: OutputPaths::default(),
            base_dir: PathBuf::new(),
        }
    }

    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self, HarnessError> {
        let mut cfg: ExperimentConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.base_dir = base_dir.to_path_buf();
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    /// Loads the process spec named by `spec_file` or the inline `process` table.
    pub fn process_spec(&self) -> Result<ProcessSpec, HarnessError> {
        match (&self.spec_file, &self.process) {
            (Some(_), Some(_)) => Err(HarnessError::Config("give either spec_file or [process], not both".into())),
            (Some(path), None) => Ok(ProcessSpec::from_file(&self.resolve(path))?),
            (None, Some(inline)) => Ok(inline.clone().build()?),
            (None, None) => Err(HarnessError::Config("missing spec_file or [process]".into())),
        }
    }

    /// Checks the config before any run. Returns warnings for soft issues.
    pub fn validate(&self, alphabet_size: usize) -> Result<Vec<String>, HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.m == 0 {
            return bad("m must be at least 1".into());
        }
        if self.n < self.m + 1 {
            return bad(format!("n = {} is too short for block length {}", self.n, self.m));
        }
        if self.seeds.is_empty() {
            return bad("seed list is empty".into());
        }
        let distinct: HashSet<_> = self.seeds.iter().collect();
        if distinct.len() != self.seeds.len() {
            return bad("seeds must be distinct".into());
        }
        if let Some(e) = self.eps.iter().find(|e| !(0.0..1.0).contains(*e)) {
            return bad(format!("eps value {e} is outside [0, 1)"));
        }
        if self.schedule == 0 {
            return bad("schedule must be at least 1".into());
        }
        if self.r_max == 0 {
            return bad("r_max must be at least 1".into());
        }
        if [self.slack, self.soft_tolerance].iter().any(|v| v.is_nan() || *v < 0.0) {
            return bad("slack and soft_tolerance must be non-negative".into());
        }
        let mut warnings = Vec::new();
        let guard = undersampling_guard(self.n, alphabet_size);
        if self.m > guard {
            warnings.push(format!(
                "m = {} exceeds the undersampling guard {} for n = {} over {} letters",
                self.m, guard, self.n, alphabet_size
            ));
        }
        Ok(warnings)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_inline_process() {
        let cfg = ExperimentConfig::from_toml_str(
            r#"
n = 1000
m = 3
eps = [0.01, 0.1]
seeds = [1, 2]
unit = "bits"

[process]
kind = "iid"
probabilities = [0.5, 0.5]
"#,
            Path::new("."),
        )
        .unwrap();
        assert_eq!(cfg.unit, Unit::Bits);
        assert_eq!(cfg.channel, ChannelKind::Substitution);
        assert_eq!(cfg.seeds, vec![Seed(1), Seed(2)]);
        assert_eq!(cfg.process_spec().unwrap(), ProcessSpec::bernoulli(0.5).unwrap());
        assert!(cfg.validate(2).unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_configs() {
        let mut cfg = ExperimentConfig::new(1000, 3, [1, 1]);
        assert!(cfg.validate(2).is_err());
        cfg.seeds = vec![Seed(1)];
        cfg.eps = vec![1.0];
        assert!(cfg.validate(2).is_err());
        cfg.eps = vec![0.5];
        assert!(cfg.validate(2).is_ok());
        cfg.m = 2000;
        assert!(cfg.validate(2).is_err());
        assert!(cfg.process_spec().is_err());
        assert!(ExperimentConfig::from_toml_str("n = 1\nm = 1\nseeds = [1]\nbogus = 3", Path::new(".")).is_err());
    }

    #[test]
    fn guard_violations_are_warnings() {
        let cfg = ExperimentConfig::new(1_000_000, 10, [1]);
        let warnings = cfg.validate(2).unwrap();
        assert_eq!(warnings.len(), 1);
    }
}
