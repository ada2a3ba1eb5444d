//! TOML scenario files.

use std::path::Path;

use cyclosync::channel::{ChannelSpec, FrameGeometry, LptvChannel};
use cyclosync::cyclostat::{NoiseModel, NoiseModelSpec};
use cyclosync::detectors::DEFAULT_MATERIALIZATION_CAP;
use cyclosync::estimation::EqualizerConfig;
use cyclosync::frame::{Constellation, SyncWord};
use cyclosync::scenarios::{DetectorParams, Scenario};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// A symbol written either as a real number or as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SymbolValue {
    Real(f64),
    Complex([f64; 2]),
}

impl SymbolValue {
    pub fn value(self) -> Complex64 {
        match self {
            SymbolValue::Real(re) => Complex64::new(re, 0.0),
            SymbolValue::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstellationConfig {
    pub symbols: Vec<SymbolValue>,
}

/// Structural integers. They are cross-checked against the channel and
/// noise models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub p_h: usize,
    pub p_z: usize,
    pub l_h: usize,
    pub l_z: usize,
    pub n: usize,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    /// One row of `L_h + 1` taps per phase.
    pub taps: Vec<Vec<SymbolValue>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub variance_profile: Vec<f64>,
    pub shaping_fir: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyncWordConfig {
    /// Vector order: the first entry is the symbol nearest to the window end.
    pub symbols: Vec<SymbolValue>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorConfig {
    pub e_r0: usize,
    pub e_r1: usize,
    #[serde(default = "default_cap")]
    pub materialization_cap: u64,
}

fn default_cap() -> u64 {
    DEFAULT_MATERIALIZATION_CAP
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EqualizerSection {
    pub delta_p: f64,
    pub l_eq: usize,
    pub xi: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub snr_db: Vec<f64>,
    pub roc_trials: usize,
    pub search_trials: usize,
    pub validation_trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub constellation: ConstellationConfig,
    pub geometry: GeometryConfig,
    pub channel: ChannelConfig,
    pub noise: NoiseConfig,
    /// Noise model assumed by the receiver when it differs from the true one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub receiver_noise: Option<NoiseConfig>,
    pub sync_word: SyncWordConfig,
    pub detector: DetectorConfig,
    pub equalizer: EqualizerSection,
    pub run: RunConfig,
}

fn noise_model(n: &NoiseConfig, section: &str) -> Result<NoiseModel, CliError> {
    let spec = NoiseModelSpec {
        period: n.variance_profile.len(),
        memory: n.shaping_fir.len().saturating_sub(1),
        variance_profile: n.variance_profile.clone(),
        shaping_fir: n.shaping_fir.clone(),
    };
    NoiseModel::try_from(spec).map_err(|e| CliError::config(format!("[{section}] {e}")))
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| CliError::config(e.to_string()))?;
        cfg.to_scenario()?;
        cfg.check_run()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    fn check_run(&self) -> Result<(), CliError> {
        let r = &self.run;
        if r.snr_db.is_empty() || r.snr_db.iter().any(|s| !s.is_finite()) {
            return Err(CliError::config("[run] snr_db: needs at least one finite value"));
        }
        if r.roc_trials == 0 || r.search_trials == 0 {
            return Err(CliError::config("[run] trial counts must be at least 1"));
        }
        if r.validation_trials < 2 {
            return Err(CliError::config("[run] validation_trials must be at least 2"));
        }
        Ok(())
    }

    /// Builds and validates the scenario.
    pub fn to_scenario(&self) -> Result<Scenario, CliError> {
        let cfg_err = |e: cyclosync::Error| CliError::config(e.to_string());
        let constellation =
            Constellation::new(self.constellation.symbols.iter().map(|s| s.value()).collect()).map_err(cfg_err)?;
        let taps = &self.channel.taps;
        let spec = ChannelSpec {
            period: taps.len(),
            memory: taps.first().map_or(0, |r| r.len().saturating_sub(1)),
            taps: taps
                .iter()
                .map(|r| r.iter().map(|v| [v.value().re, v.value().im]).collect())
                .collect(),
        };
        let channel = LptvChannel::try_from(spec).map_err(|e| CliError::config(format!("[channel] {e}")))?;
        let noise_shape = noise_model(&self.noise, "noise")?;
        let receiver_noise = match &self.receiver_noise {
            Some(n) => Some(noise_model(n, "receiver_noise")?),
            None => None,
        };
        let g = self.geometry;
        let geometry = FrameGeometry::new(g.p_h, g.p_z, g.l_h, g.l_z, g.n, g.m).map_err(cfg_err)?;
        let implied = (channel.period(), noise_shape.period(), channel.memory(), noise_shape.memory());
        if implied != (g.p_h, g.p_z, g.l_h, g.l_z) {
            return Err(CliError::config(format!(
                "[geometry] (p_h, p_z, l_h, l_z) = ({}, {}, {}, {}) but the channel and noise imply {:?}",
                g.p_h, g.p_z, g.l_h, g.l_z, implied
            )));
        }
        let sw_values: Vec<Complex64> = self.sync_word.symbols.iter().map(|s| s.value()).collect();
        let sync_word = SyncWord::from_symbols(&constellation, &sw_values).map_err(cfg_err)?;
        let e = self.equalizer;
        let equalizer = EqualizerConfig::new(
            e.delta_p,
            e.l_eq,
            e.xi,
            constellation.gamma_s2(),
            geometry.p_h,
            geometry.l_ch,
            e.omega,
        )
        .map_err(cfg_err)?;
        let scenario = Scenario {
            name: self.name.clone(),
            constellation,
            geometry,
            channel,
            noise_shape,
            receiver_noise,
            sync_word,
            detector: DetectorParams {
                e_r0: self.detector.e_r0,
                e_r1: self.detector.e_r1,
                materialization_cap: self.detector.materialization_cap,
            },
            equalizer,
        };
        scenario.validate().map_err(cfg_err)?;
        Ok(scenario)
    }

    /// One-line summary of the derived quantities.
    pub fn derived_summary(&self) -> Result<String, CliError> {
        let s = self.to_scenario()?;
        let (g, e) = (&s.geometry, &s.equalizer);
        Ok(format!(
            "{}: K={} L_ch={} L_sw={} L_tot={} J={} Psi={} Omega={} gamma_s2={}",
            s.name,
            g.k,
            g.l_ch,
            g.l_sw,
            g.l_tot,
            e.j,
            e.psi,
            e.omega,
            s.constellation.gamma_s2()
        ))
    }
}
