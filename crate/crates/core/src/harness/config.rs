use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::algorithms::ParamOverrides;
use crate::error::{Error, Result};
use crate::geometry::ConstraintSet;
use crate::objectives::SetFamilyKind;
use crate::oracles::OracleSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmKind {
    MonoFw,
    BanditFw,
    ResponsiveFw,
}

impl AlgorithmKind {
    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmKind::MonoFw => "mono_fw",
            AlgorithmKind::BanditFw => "bandit_fw",
            AlgorithmKind::ResponsiveFw => "responsive_fw",
        }
    }
}

fn default_noise() -> f64 {
    0.5
}

fn default_universe() -> usize {
    20
}

fn default_clients() -> usize {
    10
}

/// Family each round's objective is drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveSpec {
    /// Random monotone DR-submodular quadratic with gradient noise `σ0`.
    Quadratic {
        #[serde(default = "default_noise")]
        noise: f64,
    },
    /// `cᵀx`; `weights = null` draws `c` uniformly from `[0.1, 1.1)^d`.
    Linear {
        #[serde(default)]
        weights: Option<Vec<f64>>,
        #[serde(default)]
        noise: f64,
    },
    Coverage {
        #[serde(default = "default_universe")]
        universe: usize,
    },
    FacilityLocation {
        #[serde(default = "default_clients")]
        clients: usize,
    },
    /// `Σ_{i∈S} w_i`; `weights = null` draws `w` uniformly from `[0, 1)^d`.
    Modular {
        #[serde(default)]
        weights: Option<Vec<f64>>,
    },
}

impl ObjectiveSpec {
    pub fn is_continuous(&self) -> bool {
        matches!(self, ObjectiveSpec::Quadratic { .. } | ObjectiveSpec::Linear { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ObjectiveSpec::Quadratic { .. } => "quadratic",
            ObjectiveSpec::Linear { .. } => "linear",
            ObjectiveSpec::Coverage { .. } => "coverage",
            ObjectiveSpec::FacilityLocation { .. } => "facility_location",
            ObjectiveSpec::Modular { .. } => "modular",
        }
    }

    pub(crate) fn set_family(&self) -> Option<SetFamilyKind> {
        match self {
            ObjectiveSpec::Coverage { .. } => Some(SetFamilyKind::Coverage),
            ObjectiveSpec::FacilityLocation { .. } => Some(SetFamilyKind::FacilityLocation),
            _ => None,
        }
    }
}

/// How the objective changes over rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "schedule", rename_all = "snake_case", deny_unknown_fields)]
pub enum AdversarySpec {
    /// One draw used every round.
    #[default]
    Fixed,
    /// A fresh independent draw every round.
    Iid,
    /// Cycles through `pool` draws, switching every `period` rounds.
    Shifting {
        period: usize,
        #[serde(default = "default_pool")]
        pool: usize,
    },
}

fn default_pool() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Falls back to `$SUBMAX_OUT`, then the working directory.
    #[serde(default)]
    pub dir: Option<PathBuf>,
    /// File stem; defaults to `<algorithm>_T<horizon>_s<seed>`.
    #[serde(default)]
    pub prefix: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub algorithm: AlgorithmKind,
    pub horizon: usize,
    pub constraint: ConstraintSet,
    pub objective: ObjectiveSpec,
    #[serde(default)]
    pub adversary: AdversarySpec,
    #[serde(default)]
    pub oracle: OracleSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub overrides: ParamOverrides,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Shape checks that need no parameter derivation.
    pub fn validate(&self) -> Result<()> {
        let d = self.constraint.dim();
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be ≥ 1".into()));
        }
        match (self.algorithm, self.objective.is_continuous()) {
            (AlgorithmKind::ResponsiveFw, true) => {
                return Err(Error::Config("responsive_fw needs a set-function objective".into()))
            }
            (AlgorithmKind::MonoFw | AlgorithmKind::BanditFw, false) => {
                return Err(Error::Config(format!("{} needs a continuous objective", self.algorithm.name())))
            }
            _ => {}
        }
        if self.algorithm == AlgorithmKind::ResponsiveFw
            && !matches!(self.constraint, ConstraintSet::UniformMatroid { .. } | ConstraintSet::PartitionMatroid { .. })
        {
            return Err(Error::Config("responsive_fw needs a uniform or partition matroid".into()));
        }
        match &self.objective {
            ObjectiveSpec::Quadratic { noise } | ObjectiveSpec::Linear { noise, .. }
                if noise.is_nan() || *noise < 0.0 =>
            {
                return Err(Error::Config("noise must be ≥ 0".into()))
            }
            ObjectiveSpec::Linear { weights: Some(w), .. } | ObjectiveSpec::Modular { weights: Some(w) } => {
                if w.len() != d {
                    return Err(Error::Config(format!(
                        "weights have length {}, constraint has dimension {d}",
                        w.len()
                    )));
                }
                if w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return Err(Error::Config("weights must be finite and ≥ 0".into()));
                }
            }
            ObjectiveSpec::Coverage { universe: 0 } => return Err(Error::Config("universe must be ≥ 1".into())),
            ObjectiveSpec::FacilityLocation { clients: 0 } => return Err(Error::Config("clients must be ≥ 1".into())),
            _ => {}
        }
        if let AdversarySpec::Shifting { period, pool } = self.adversary {
            if period == 0 || pool == 0 {
                return Err(Error::Config("shifting needs period ≥ 1 and pool ≥ 1".into()));
            }
        }
        Ok(())
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output
            .dir
            .clone()
            .or_else(|| std::env::var_os("SUBMAX_OUT").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn output_prefix(&self) -> String {
        self.output
            .prefix
            .clone()
            .unwrap_or_else(|| format!("{}_T{}_s{}", self.algorithm.name(), self.horizon, self.seed))
    }
}
