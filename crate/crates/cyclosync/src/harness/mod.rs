//! Monte-Carlo evaluation: statistic sampling, ROC/AUC, sync-word search,
//! complexity tables and the statistical model checks.

mod complexity;
mod roc;
mod search;
pub mod validate;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::calibrate_noise_power;
use crate::cyclostat::{noise_cov_matrix, NoiseModel};
use crate::detectors::{
    build_grid_sets, correlator_statistic, hard_decision, salrt_statistic, CandidateIndexing, DetectorId,
    KnownChannel,
};
use crate::estimation::estimate_channel;
use crate::frame::{draw_symbols, post_process, receive, Hypothesis, Layout, ObservationWindow};
use crate::linalg::hermitian_inverse;
use crate::scenarios::Scenario;
use crate::{CMatrix, Error, Result};

pub use complexity::{complexity_report, ComplexityRow};
pub use roc::{auc, empirical_roc, RocCurve, RocPoint};
pub use search::{sw_search, AucHistogram, AucResult, HistogramBin, SearchReport, SwCandidates};

/// What a random stream is used for inside one trial.
#[derive(Debug, Clone, Copy)]
pub enum StreamPurpose {
    Data = 0,
    Noise = 1,
    ContiguousData = 2,
}

/// Deterministic per-trial generator keyed by `(seed, trial, hypothesis, purpose)`.
pub fn trial_rng(seed: u64, trial: u64, hyp: Hypothesis, purpose: StreamPurpose) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = match hyp {
        Hypothesis::H0 => 0,
        Hypothesis::H1 => 1,
    };
    rng.set_stream(trial * 8 + h * 4 + purpose as u64);
    rng
}

/// Statistics of one detector under both hypotheses.
#[derive(Debug, Clone, PartialEq)]
pub struct StatisticSamples {
    pub detector: DetectorId,
    pub h0: Vec<f64>,
    pub h1: Vec<f64>,
}

/// Per-SNR receiver state shared read-only by all trials.
pub struct Evaluator<'a> {
    scenario: &'a Scenario,
    noise: NoiseModel,
    c_inv: CMatrix,
    idx: CandidateIndexing,
    known: Option<KnownChannel>,
    sw_symbols: Vec<Complex64>,
    detectors: Vec<DetectorId>,
}

impl<'a> Evaluator<'a> {
    pub fn new(scenario: &'a Scenario, detectors: &[DetectorId], snr_db: f64) -> Result<Self> {
        scenario.validate()?;
        let g = &scenario.geometry;
        let sigma_s2 = scenario.constellation.sigma_s2();
        let scale = calibrate_noise_power(&scenario.channel, g, &scenario.noise_shape, sigma_s2, snr_db)?;
        let noise = scenario.noise_shape.scaled(scale)?;
        let rx_noise = scenario.receiver_shape().scaled(scale)?;
        let c_inv = hermitian_inverse(&noise_cov_matrix(&rx_noise, g.k, g.n)?)?;
        let idx = CandidateIndexing::new(&scenario.constellation, g);
        let needs_known = detectors
            .iter()
            .any(|d| matches!(d, DetectorId::Lrt | DetectorId::Alrt | DetectorId::Ralrt));
        let known = if needs_known {
            let b = crate::channel::build_b_matrix(&scenario.channel, g, 0);
            Some(KnownChannel::new(
                b,
                c_inv.clone(),
                idx.clone(),
                scenario.sync_word.clone(),
                scenario.detector.materialization_cap,
            )?)
        } else {
            None
        };
        Ok(Self {
            scenario,
            noise,
            c_inv,
            idx,
            known,
            sw_symbols: scenario.sync_word.symbols(&scenario.constellation),
            detectors: detectors.to_vec(),
        })
    }

    /// Noise model at the calibrated scale.
    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    /// Draws the window of `trial` under `hyp` with the given layout.
    pub fn window(&self, seed: u64, trial: u64, hyp: Hypothesis, layout: Layout) -> Result<ObservationWindow> {
        let s = self.scenario;
        let purpose = match layout {
            Layout::Interleaved => StreamPurpose::Data,
            Layout::Contiguous => StreamPurpose::ContiguousData,
        };
        let mut data_rng = trial_rng(seed, trial, hyp, purpose);
        let mut noise_rng = trial_rng(seed, trial, hyp, StreamPurpose::Noise);
        let tx = draw_symbols(
            hyp,
            layout,
            &s.sync_word,
            &s.constellation,
            &s.geometry,
            s.equalizer.l_eq,
            &mut data_rng,
        );
        receive(&tx, &s.constellation, &s.geometry, &s.channel, &self.noise, &mut noise_rng)
    }

    /// Statistic of `detector` on an interleaved-layout window.
    pub fn evaluate(&self, detector: DetectorId, w: &ObservationWindow) -> Result<f64> {
        let s = self.scenario;
        let known = || {
            self.known
                .as_ref()
                .ok_or_else(|| Error::Structural(format!("{detector} was not requested at construction")))
        };
        match detector {
            DetectorId::Correlator => Ok(correlator_statistic(&w.samples, &self.sw_symbols)),
            DetectorId::Lrt => known()?.lrt(&post_process(&w.samples, &s.geometry)?),
            DetectorId::Alrt => known()?.alrt(&post_process(&w.samples, &s.geometry)?),
            DetectorId::Ralrt => {
                let grids = self.grids(w)?;
                known()?.ralrt(&post_process(&w.samples, &s.geometry)?, &grids)
            }
            DetectorId::Salrt => {
                let grids = self.grids(w)?;
                let est = estimate_channel(&w.trailing, &s.equalizer, &s.constellation, &s.geometry)?;
                salrt_statistic(
                    &post_process(&w.samples, &s.geometry)?,
                    &est.b_hat,
                    &self.c_inv,
                    &grids,
                    &self.idx,
                    &s.sync_word,
                )
            }
        }
    }

    fn grids(&self, w: &ObservationWindow) -> Result<crate::detectors::GridSets> {
        let hd = hard_decision(&w.samples, &self.idx)?;
        build_grid_sets(&hd, &self.idx, self.scenario.detector.e_r0, self.scenario.detector.e_r1)
    }

    /// All requested statistics for one trial, `(h0, h1)` per detector.
    pub fn trial(&self, seed: u64, trial: u64) -> Result<Vec<(f64, f64)>> {
        let mut out = Vec::with_capacity(self.detectors.len());
        let w0 = self.window(seed, trial, Hypothesis::H0, Layout::Interleaved)?;
        let w1 = self.window(seed, trial, Hypothesis::H1, Layout::Interleaved)?;
        let needs_contiguous = self.detectors.contains(&DetectorId::Correlator);
        let w1c = if needs_contiguous {
            Some(self.window(seed, trial, Hypothesis::H1, Layout::Contiguous)?)
        } else {
            None
        };
        for d in &self.detectors {
            let h1_window = match (d, &w1c) {
                (DetectorId::Correlator, Some(c)) => c,
                _ => &w1,
            };
            let v0 = self.evaluate(*d, &w0)?;
            let v1 = self.evaluate(*d, h1_window)?;
            if !v0.is_finite() || !v1.is_finite() {
                return Err(Error::NumericalDivergence(format!("{d} produced a non-finite statistic")));
            }
            out.push((v0, v1));
        }
        Ok(out)
    }
}

/// Draws `n_trials` windows per hypothesis and evaluates each detector on
/// them. Every trial has its own random streams, so results do not depend
/// on the number of worker threads.
pub fn sample_statistics(
    scenario: &Scenario,
    detectors: &[DetectorId],
    snr_db: f64,
    n_trials: usize,
    seed: u64,
) -> Result<Vec<StatisticSamples>> {
    if n_trials == 0 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    let ev = Evaluator::new(scenario, detectors, snr_db)?;
    let per_trial: Vec<Vec<(f64, f64)>> = (0..n_trials as u64)
        .into_par_iter()
        .map(|t| {
            ev.trial(seed, t).map_err(|e| Error::Trial {
                trial: t,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;
    Ok(detectors
        .iter()
        .enumerate()
        .map(|(i, d)| StatisticSamples {
            detector: *d,
            h0: per_trial.iter().map(|t| t[i].0).collect(),
            h1: per_trial.iter().map(|t| t[i].1).collect(),
        })
        .collect())
}
