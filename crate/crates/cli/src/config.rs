use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use thabound_core::budget::ComponentCatalog;
use thabound_core::{AttackModel, ChannelParams, SourceModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRange {
    pub l_min: f64,
    pub l_max: f64,
    pub step: f64,
}

impl Default for SweepRange {
    fn default() -> Self {
        SweepRange {
            l_min: 0.0,
            l_max: 200.0,
            step: 1.0,
        }
    }
}

/// Everything one invocation needs, as read from `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub channel: ChannelParams,
    pub source: SourceModel,
    #[serde(default)]
    pub attacks: Vec<AttackModel>,
    #[serde(default)]
    pub sweep: SweepRange,
    pub output_path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog: Option<ComponentCatalog>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).context("invalid config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.channel.validate()?;
        self.source.validate()?;
        if let Some(cat) = &self.catalog {
            cat.validate()?;
        }
        thabound_core::rate::distance_grid(self.sweep.l_min, self.sweep.l_max, self.sweep.step)?;
        Ok(())
    }

    /// The configured attacks, or no attack when the list is empty.
    pub fn attacks_or_none(&self) -> Vec<AttackModel> {
        if self.attacks.is_empty() {
            vec![AttackModel::NONE]
        } else {
            self.attacks.clone()
        }
    }
}

/// Bundled figure configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// Single photon, general attack.
    Fig3,
    /// Decoy (s = 0.5), general attack.
    Fig4,
    /// Single photon, passive attack.
    Fig9,
    /// Decoy, passive attack.
    Fig10,
    /// Single photon, USD attack.
    Fig11,
    /// Decoy, USD attack.
    Fig12,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig9 => "fig9",
            Preset::Fig10 => "fig10",
            Preset::Fig11 => "fig11",
            Preset::Fig12 => "fig12",
        }
    }

    pub fn config(self) -> RunConfig {
        let decoy = SourceModel::Decoy { signal_mean: 0.5 };
        let (source, make, mus): (SourceModel, fn(f64) -> AttackModel, &[f64]) = match self {
            Preset::Fig3 => (
                SourceModel::SinglePhoton,
                general,
                &[1e-2, 1e-4, 1e-6, 1e-8],
            ),
            Preset::Fig4 => (decoy, general, &[1e-2, 1e-4, 1e-6, 1e-8]),
            Preset::Fig9 => (SourceModel::SinglePhoton, passive, &[0.3, 0.1, 1e-2, 1e-3]),
            Preset::Fig10 => (decoy, passive, &[0.3, 0.1, 1e-2, 1e-3]),
            Preset::Fig11 => (SourceModel::SinglePhoton, usd, &[1e-2, 1e-3, 1e-4, 1e-6]),
            Preset::Fig12 => (decoy, usd, &[1e-2, 1e-3, 1e-4, 1e-6]),
        };
        let mut attacks = vec![AttackModel::NONE];
        attacks.extend(mus.iter().map(|&m| make(m)));
        RunConfig {
            channel: ChannelParams::standard(),
            source,
            attacks,
            sweep: SweepRange::default(),
            output_path: PathBuf::from(format!("{}.csv", self.name())),
            catalog: None,
        }
    }
}

fn general(mu: f64) -> AttackModel {
    AttackModel::general(mu).expect("preset mu_out is valid")
}

fn passive(mu: f64) -> AttackModel {
    AttackModel::passive(mu).expect("preset mu_out is valid")
}

fn usd(mu: f64) -> AttackModel {
    AttackModel::usd(mu).expect("preset mu_out is valid")
}

/// Picks the config from `--config`, `--preset`, or the fig3 default.
pub fn resolve(config: Option<&Path>, preset: Option<Preset>) -> anyhow::Result<RunConfig> {
    match (config, preset) {
        (Some(_), Some(_)) => bail!("--config and --preset are mutually exclusive"),
        (Some(path), None) => RunConfig::load(path),
        (None, Some(p)) => Ok(p.config()),
        (None, None) => Ok(Preset::Fig3.config()),
    }
}
