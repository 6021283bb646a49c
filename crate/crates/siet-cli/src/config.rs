//! Scenario configuration: one TOML file with constellation, channel,
//! harvester, code, target and sweep sections.
//!
//! All numerals are plain decimal TOML values; parsing is locale
//! independent.

use serde::Deserialize;
use siet::code::{CodebookMode, MessageCount};
use siet::constellation::Constellation;
use siet::energy::HarvesterModel;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub constellation: Constellation,
    pub channel: ChannelConfig,
    #[serde(default)]
    pub model: ModelConfig,
    pub code: CodeConfig,
    #[serde(default)]
    pub targets: TargetsConfig,
    #[serde(default)]
    pub sweep: SweepSections,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub noise_variance: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: u64,
}

fn default_trials() -> u64 {
    100_000
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub k1: f64,
    pub k2: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        let m = HarvesterModel::default();
        ModelConfig { k1: m.k1, k2: m.k2 }
    }
}

impl From<ModelConfig> for HarvesterModel {
    fn from(c: ModelConfig) -> Self {
        HarvesterModel { k1: c.k1, k2: c.k2 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeConfig {
    pub block_length: u64,
    /// Per-layer usage frequencies; defaults to counts-proportional.
    #[serde(default)]
    pub layer_probs: Option<Vec<f64>>,
    /// `"max"` or a message count.
    #[serde(default)]
    pub messages: MessagesConfig,
    /// `"enumerate"` or `"sample"`.
    #[serde(default)]
    pub mode: ModeConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum MessagesConfig {
    Count(u64),
    Keyword(String),
}

impl Default for MessagesConfig {
    fn default() -> Self {
        MessagesConfig::Keyword("max".into())
    }
}

impl MessagesConfig {
    pub fn to_message_count(&self) -> Result<MessageCount, CliError> {
        match self {
            MessagesConfig::Count(m) => Ok(MessageCount::Exact(*m)),
            MessagesConfig::Keyword(s) if s == "max" => Ok(MessageCount::Max),
            MessagesConfig::Keyword(s) => Err(CliError::Config(format!(
                "messages must be \"max\" or a count, got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum ModeConfig {
    #[default]
    Enumerate,
    Sample,
}

impl ModeConfig {
    pub fn to_codebook_mode(self, seed: u64) -> CodebookMode {
        match self {
            ModeConfig::Enumerate => CodebookMode::Enumerate,
            ModeConfig::Sample => CodebookMode::Sample { seed },
        }
    }
}

/// Optional bound targets; unset targets default to the scenario's own
/// block energy (no outage) and a zero outage budget.
#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetsConfig {
    /// Energy rate `B` the harvester must collect per block.
    pub energy_rate: Option<f64>,
    /// Outage budget `delta` for the energy-rate caps.
    pub eop: Option<f64>,
    /// DEP target `epsilon` (drives the equal-radius geometry in sweeps).
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSections {
    pub figbr: Option<FigBrSweep>,
    pub regions: Option<RegionsSweep>,
}

/// Rate/energy trade-off sweep over the layer-1 probability and the
/// second-layer amplitude of a two-layer scenario.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigBrSweep {
    pub p_grid: Vec<f64>,
    pub a2_grid: Vec<f64>,
}

/// Information-energy region sweep: equal decoding radii derived from a DEP
/// grid, amplitudes spaced by twice the radius, probability simplex walked
/// with a fixed step.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionsSweep {
    pub epsilon_grid: Vec<f64>,
    #[serde(default = "default_p_step")]
    pub p_step: f64,
}

fn default_p_step() -> f64 {
    0.1
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    /// Optional codebook file to run both decoders against.
    pub codebook: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Default output path; `--out` overrides.
    pub path: Option<String>,
}

impl ScenarioConfig {
    pub fn from_path(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{e}")))
    }

    /// Grid invariant shared by both sweeps: non-empty, strictly increasing.
    pub fn check_grid(name: &str, grid: &[f64]) -> Result<(), CliError> {
        if grid.is_empty() {
            return Err(CliError::Config(format!("{name} grid is empty")));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Config(format!(
                "{name} grid must be strictly increasing"
            )));
        }
        Ok(())
    }
}
