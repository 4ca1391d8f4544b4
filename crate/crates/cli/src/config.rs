use std::path::Path;

use hashrep_core::bell::NoiseParams;
use hashrep_core::bounds::DeltaSchedule;
use hashrep_core::rates::{RepeaterScenario, C_FIBER};
use hashrep_core::recurrence::{PairAccounting, PairingSchedule};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Command;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config field `{field}`: {message}")]
    Field { field: &'static str, message: String },
}

fn field(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

/// Declarative description of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Must match the command given on the command line when present.
    #[serde(default)]
    pub command: Option<Command>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default = "default_format")]
    pub format: Format,
    #[serde(default)]
    pub scenario: Scenario,
    #[serde(default)]
    pub sweep: Sweep,
}

fn default_trials() -> u64 {
    1000
}

fn default_format() -> Format {
    Format::Csv
}

/// Physical parameters; lengths in km, times in s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Scenario {
    pub fidelity_in: f64,
    /// Depolarizing reliability per qubit; 1 means noiseless.
    pub p_ldn: f64,
    pub total_length_km: f64,
    pub links: u64,
    pub eta: f64,
    pub t0: Option<f64>,
    pub tp: f64,
    pub c_fiber: f64,
    pub n: u64,
    pub epsilon: Option<f64>,
    pub delta: DeltaSchedule,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            fidelity_in: 0.95,
            p_ldn: 0.99,
            total_length_km: 10_000.0,
            links: 1000,
            eta: 2.0 / 3.0,
            t0: None,
            tp: 1e-6,
            c_fiber: C_FIBER,
            n: 2000,
            epsilon: None,
            delta: DeltaSchedule::Power { exponent: 0.25 },
        }
    }
}

impl Scenario {
    pub fn noise(&self) -> NoiseParams {
        NoiseParams::new(self.p_ldn).expect("validated")
    }

    pub fn repeater(&self) -> RepeaterScenario {
        RepeaterScenario {
            total_length_km: self.total_length_km,
            links: self.links,
            eta: self.eta,
            t0: self.t0,
            tp: self.tp,
            c_fiber: self.c_fiber,
            n: self.n,
            schedule: self.delta,
            epsilon: self.epsilon,
            resource_noise: self.noise(),
            fidelity_in: self.fidelity_in,
        }
    }
}

/// Inclusive integer range or explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntAxis {
    List(Vec<u64>),
    Range { start: u64, stop: u64, step: u64 },
}

impl IntAxis {
    pub fn values(&self) -> Vec<u64> {
        match self {
            IntAxis::List(v) => v.clone(),
            IntAxis::Range { start, stop, step } => {
                (*start..=*stop).step_by((*step).max(1) as usize).collect()
            }
        }
    }
}

/// Sweep axes; empty axes fall back to the scenario value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sweep {
    pub fidelities: Vec<f64>,
    pub n: Option<IntAxis>,
    pub links: Vec<u64>,
    pub deltas: Vec<DeltaSchedule>,
    pub block_sizes: Vec<u64>,
    pub levels: usize,
    pub link_exponents: Vec<u32>,
    pub schedules: Vec<PairingSchedule>,
    pub accountings: Vec<PairAccounting>,
    /// Target end-to-end infidelity of the hashing side of the comparison.
    pub target_infidelity: f64,
    /// Target fidelity for `nmin`; defaults to the input fidelity.
    pub target_fidelity: Option<f64>,
    /// Emit the working-fidelity sweep instead of the comparison table.
    pub working_fidelity_sweep: bool,
    /// Parity rounds of the random hashing circuit for `resource-state`.
    pub circuit_rounds: usize,
}

impl Default for Sweep {
    fn default() -> Self {
        Self {
            fidelities: Vec::new(),
            n: None,
            links: Vec::new(),
            deltas: Vec::new(),
            block_sizes: Vec::new(),
            levels: 4,
            link_exponents: (7..=13).collect(),
            schedules: PairingSchedule::ALL.to_vec(),
            accountings: PairAccounting::ALL.to_vec(),
            target_infidelity: 1e-3,
            target_fidelity: None,
            working_fidelity_sweep: false,
            circuit_rounds: 1,
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let c: Self = toml::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let s = &self.scenario;
        let fid = |name, f: f64| {
            if f > 0.25 && f <= 1.0 {
                Ok(())
            } else {
                Err(field(name, format!("{f} is outside (0.25, 1]")))
            }
        };
        fid("scenario.fidelity_in", s.fidelity_in)?;
        for &f in &self.sweep.fidelities {
            fid("sweep.fidelities", f)?;
        }
        if let Some(f) = self.sweep.target_fidelity {
            fid("sweep.target_fidelity", f)?;
        }
        if !(0.0..=1.0).contains(&s.p_ldn) {
            return Err(field("scenario.p_ldn", format!("{} is outside [0, 1]", s.p_ldn)));
        }
        s.repeater()
            .validate()
            .map_err(|e| field("scenario", e.to_string()))?;
        s.delta
            .validate()
            .map_err(|e| field("scenario.delta", e.to_string()))?;
        for d in &self.sweep.deltas {
            d.validate().map_err(|e| field("sweep.deltas", e.to_string()))?;
        }
        if self.trials == 0 {
            return Err(field("trials", "must be positive"));
        }
        if let Some(IntAxis::Range { start, stop, step }) = &self.sweep.n {
            if *step == 0 || start > stop {
                return Err(field("sweep.n", "range needs start <= stop and step > 0"));
            }
        }
        if self.ns().contains(&0) {
            return Err(field("sweep.n", "values must be positive"));
        }
        if self.links().contains(&0) {
            return Err(field("sweep.links", "values must be positive"));
        }
        if self.sweep.block_sizes.contains(&0) {
            return Err(field("sweep.block_sizes", "values must be positive"));
        }
        if self.sweep.link_exponents.iter().any(|&k| k > 30) {
            return Err(field("sweep.link_exponents", "values must be at most 30"));
        }
        if self.sweep.schedules.is_empty() || self.sweep.accountings.is_empty() {
            return Err(field("sweep", "schedules and accountings must be non-empty"));
        }
        if !(self.sweep.target_infidelity > 0.0 && self.sweep.target_infidelity < 1.0) {
            return Err(field("sweep.target_infidelity", "must lie in (0, 1)"));
        }
        Ok(())
    }

    pub fn fidelities(&self) -> Vec<f64> {
        if self.sweep.fidelities.is_empty() {
            vec![self.scenario.fidelity_in]
        } else {
            self.sweep.fidelities.clone()
        }
    }

    pub fn ns(&self) -> Vec<u64> {
        self.sweep
            .n
            .as_ref()
            .map_or_else(|| vec![self.scenario.n], IntAxis::values)
    }

    pub fn links(&self) -> Vec<u64> {
        if self.sweep.links.is_empty() {
            vec![self.scenario.links]
        } else {
            self.sweep.links.clone()
        }
    }

    pub fn deltas(&self) -> Vec<DeltaSchedule> {
        if self.sweep.deltas.is_empty() {
            vec![self.scenario.delta]
        } else {
            self.sweep.deltas.clone()
        }
    }

    /// SHA-256 of the canonical JSON form of the parsed config, so comments
    /// and formatting do not change it.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical))
    }
}
