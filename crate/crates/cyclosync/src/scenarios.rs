//! Reference scenarios: an LTI channel in WSS noise and an LPTV channel in
//! cyclostationary noise, both with `N = 8`, `M = 2`, BPSK.

use num_complex::Complex64;

use crate::channel::{FrameGeometry, LptvChannel};
use crate::cyclostat::NoiseModel;
use crate::detectors::DEFAULT_MATERIALIZATION_CAP;
use crate::estimation::{EqualizerConfig, DEFAULT_STEP};
use crate::frame::{Constellation, SyncWord};
use crate::{Error, Result};

/// Shaping filter whose autocorrelation is `(1, 0.5, 0.3)` at lags 0..2
/// for unit innovation variance.
pub const WSS_SHAPING_FIR: [f64; 3] = [0.833_669_103_923_839_4, 0.418_927_440_209_113_3, 0.359_855_005_526_757_3];

/// Channel taps of the LTI reference channel (even phase of the LPTV one).
pub const LTI_TAPS: [(f64, f64); 3] = [(1.05, -0.82), (0.71, 0.45), (0.63, -0.72)];
/// Odd phase of the LPTV reference channel.
pub const ODD_PHASE_TAPS: [(f64, f64); 3] = [(0.53, 0.62), (0.41, 0.37), (0.20, -0.34)];

/// Best sync word of the LTI scenario.
pub const F_SW1: [f64; 12] = [-1.0, 1.0, -1.0, 1.0, -1.0, 1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetectorParams {
    pub e_r0: usize,
    pub e_r1: usize,
    pub materialization_cap: u64,
}

/// Everything needed to simulate and detect one scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub constellation: Constellation,
    pub geometry: FrameGeometry,
    pub channel: LptvChannel,
    /// True noise shape at unit scale.
    pub noise_shape: NoiseModel,
    /// Noise shape assumed by the receiver; the true shape when `None`.
    pub receiver_noise: Option<NoiseModel>,
    pub sync_word: SyncWord,
    pub detector: DetectorParams,
    pub equalizer: EqualizerConfig,
}

impl Scenario {
    /// Validates cross-field consistency.
    pub fn validate(&self) -> Result<()> {
        let g = FrameGeometry::from_models(&self.channel, &self.noise_shape, self.geometry.n, self.geometry.m)?;
        if g != self.geometry {
            return Err(Error::invalid("geometry", "does not match the channel and noise models"));
        }
        if let Some(rx) = &self.receiver_noise {
            if rx.period() != self.noise_shape.period() || rx.memory() > self.geometry.l_ch {
                return Err(Error::invalid(
                    "receiver_noise",
                    "must share the true noise period and fit within L_ch",
                ));
            }
        }
        self.sync_word.check_geometry(&self.geometry)?;
        if self.detector.e_r0 > g.n {
            return Err(Error::invalid("detector.e_r0", format!("must be at most N = {}", g.n)));
        }
        if self.detector.e_r1 > g.l_ch {
            return Err(Error::invalid("detector.e_r1", format!("must be at most L_ch = {}", g.l_ch)));
        }
        if self.equalizer.p_h != g.p_h || self.equalizer.l_ch != g.l_ch {
            return Err(Error::invalid("equalizer", "P_h / L_ch differ from the geometry"));
        }
        Ok(())
    }

    /// Noise shape the receiver models.
    pub fn receiver_shape(&self) -> &NoiseModel {
        self.receiver_noise.as_ref().unwrap_or(&self.noise_shape)
    }

    /// Copy with a different sync word.
    pub fn with_sync_word(&self, sw: SyncWord) -> Self {
        Self {
            sync_word: sw,
            ..self.clone()
        }
    }
}

fn taps(t: &[(f64, f64)]) -> Vec<Complex64> {
    t.iter().map(|(re, im)| Complex64::new(*re, *im)).collect()
}

fn bpsk_word(c: &Constellation, values: &[f64]) -> SyncWord {
    let s: Vec<Complex64> = values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    SyncWord::from_symbols(c, &s).expect("BPSK word")
}

fn detector_params() -> DetectorParams {
    DetectorParams {
        e_r0: 3,
        e_r1: 2,
        materialization_cap: DEFAULT_MATERIALIZATION_CAP,
    }
}

/// LTI channel, WSS noise with correlation `(1, 0.5, 0.3)`, sync word `F_SW1`.
pub fn scenario1() -> Scenario {
    let constellation = Constellation::bpsk();
    let channel = LptvChannel::lti(taps(&LTI_TAPS)).expect("valid taps");
    let noise_shape = NoiseModel::new(vec![1.0], WSS_SHAPING_FIR.to_vec()).expect("valid noise");
    let geometry = FrameGeometry::from_models(&channel, &noise_shape, 8, 2).expect("valid geometry");
    let equalizer = EqualizerConfig::new(DEFAULT_STEP, 300, 100, constellation.gamma_s2(), 1, 2, None).expect("valid");
    Scenario {
        name: "scenario1".into(),
        sync_word: bpsk_word(&constellation, &F_SW1),
        constellation,
        geometry,
        channel,
        noise_shape,
        receiver_noise: None,
        detector: detector_params(),
        equalizer,
    }
}

/// Period-2 channel, period-8 noise `(2 + cos(2 pi m / 8))` filtered by
/// `[0.6, 0.2, 0.066]`, all-ones sync word.
pub fn scenario2() -> Scenario {
    let constellation = Constellation::bpsk();
    let channel = LptvChannel::new(vec![taps(&LTI_TAPS), taps(&ODD_PHASE_TAPS)]).expect("valid taps");
    let profile = (0..8)
        .map(|m| 2.0 + (2.0 * std::f64::consts::PI * m as f64 / 8.0).cos())
        .collect();
    let noise_shape = NoiseModel::new(profile, vec![0.6, 0.2, 0.066]).expect("valid noise");
    let geometry = FrameGeometry::from_models(&channel, &noise_shape, 8, 2).expect("valid geometry");
    let equalizer = EqualizerConfig::new(DEFAULT_STEP, 300, 50, constellation.gamma_s2(), 2, 2, None).expect("valid");
    Scenario {
        name: "scenario2".into(),
        sync_word: bpsk_word(&constellation, &[1.0; 12]),
        constellation,
        geometry,
        channel,
        noise_shape,
        receiver_noise: None,
        detector: detector_params(),
        equalizer,
    }
}
