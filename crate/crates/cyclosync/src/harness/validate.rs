//! Monte-Carlo checks of the statistical model behind the detectors.
//!
//! Every check compares sample moments against their model values and
//! fails when any real or imaginary part deviates by more than
//! `Z_LIMIT` standard errors.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channel::calibrate_noise_power;
use crate::cyclostat::{generate_acgn_at, noise_cov_matrix, NoiseModel};
use crate::frame::{draw_symbols, post_process, receive, Hypothesis, Layout, TxSymbols};
use crate::scenarios::Scenario;
use crate::{Error, Result};

pub const Z_LIMIT: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// Largest standardized deviation seen.
    pub worst_z: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub trials: usize,
    pub checks: Vec<CheckOutcome>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Standardized deviation of the mean of `x` from `target`, worst of the
/// real and imaginary parts. Components with zero spread must match exactly
/// (to roundoff).
pub fn z_score(x: &[Complex64], target: Complex64) -> f64 {
    let n = x.len() as f64;
    let mean: Complex64 = x.iter().sum::<Complex64>() / n;
    let var_re = x.iter().map(|v| (v.re - mean.re).powi(2)).sum::<f64>() / (n - 1.0);
    let var_im = x.iter().map(|v| (v.im - mean.im).powi(2)).sum::<f64>() / (n - 1.0);
    let part = |d: f64, var: f64| {
        let se = (var / n).sqrt();
        if se > 1e-12 {
            d.abs() / se
        } else if d.abs() < 1e-9 {
            0.0
        } else {
            f64::INFINITY
        }
    };
    part(mean.re - target.re, var_re).max(part(mean.im - target.im, var_im))
}

struct Tracker {
    worst: f64,
    at: String,
}

impl Tracker {
    fn new() -> Self {
        Self {
            worst: 0.0,
            at: String::new(),
        }
    }

    fn add(&mut self, z: f64, at: impl FnOnce() -> String) {
        if z > self.worst || self.at.is_empty() {
            self.worst = z;
            self.at = at();
        }
    }

    fn finish(self, name: &str) -> CheckOutcome {
        CheckOutcome {
            name: name.into(),
            passed: self.worst <= Z_LIMIT,
            worst_z: self.worst,
            detail: format!("worst deviation {:.2} standard errors at {}", self.worst, self.at),
        }
    }
}

fn scaled_models(s: &Scenario, snr_db: f64) -> Result<(NoiseModel, NoiseModel)> {
    let scale = calibrate_noise_power(&s.channel, &s.geometry, &s.noise_shape, s.constellation.sigma_s2(), snr_db)?;
    Ok((s.noise_shape.scaled(scale)?, s.receiver_shape().scaled(scale)?))
}

fn rngs(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn post_processed(s: &Scenario, tx: &TxSymbols, noise: &NoiseModel, rng: &mut ChaCha8Rng) -> Result<Vec<Complex64>> {
    let w = receive(tx, &s.constellation, &s.geometry, &s.channel, noise, rng)?;
    post_process(&w.samples, &s.geometry)
}

/// Post-processed `H0` windows have zero mean.
pub fn h0_mean_zero(s: &Scenario, snr_db: f64, trials: usize, seed: u64) -> Result<CheckOutcome> {
    let (noise, _) = scaled_models(s, snr_db)?;
    let mut data = rngs(seed, 0);
    let mut nrng = rngs(seed, 1);
    let mut rows = Vec::with_capacity(trials);
    for _ in 0..trials {
        let tx = draw_symbols(Hypothesis::H0, Layout::Interleaved, &s.sync_word, &s.constellation, &s.geometry, 0, &mut data);
        rows.push(post_processed(s, &tx, &noise, &mut nrng)?);
    }
    let mut t = Tracker::new();
    for j in 0..s.geometry.l_sw {
        let col: Vec<Complex64> = rows.iter().map(|r| r[j]).collect();
        t.add(z_score(&col, Complex64::new(0.0, 0.0)), || format!("coordinate {j}"));
    }
    Ok(t.finish("h0_mean_zero"))
}

/// With the transmitted symbols held fixed, every post-processed block has
/// covariance equal to the receiver's `C_z`.
pub fn conditional_covariance(s: &Scenario, hyp: Hypothesis, snr_db: f64, trials: usize, seed: u64) -> Result<CheckOutcome> {
    let (noise, rx_noise) = scaled_models(s, snr_db)?;
    let g = &s.geometry;
    let c = noise_cov_matrix(&rx_noise, g.k, g.n)?;
    let mut data = rngs(seed, 2);
    let tx = draw_symbols(hyp, Layout::Interleaved, &s.sync_word, &s.constellation, g, 0, &mut data);
    let mut nrng = rngs(seed, 3);
    let rows = (0..trials)
        .map(|_| post_processed(s, &tx, &noise, &mut nrng))
        .collect::<Result<Vec<_>>>()?;
    let n = trials as f64;
    let mean: Vec<Complex64> = (0..g.l_sw)
        .map(|j| rows.iter().map(|r| r[j]).sum::<Complex64>() / n)
        .collect();
    let mut t = Tracker::new();
    for m in 0..g.m {
        for a in 0..g.k {
            for b in 0..g.k {
                let (ja, jb) = (m * g.k + a, m * g.k + b);
                let prod: Vec<Complex64> = rows
                    .iter()
                    .map(|r| (r[ja] - mean[ja]) * (r[jb] - mean[jb]).conj())
                    .collect();
                // sample-mean subtraction biases the estimate by (n-1)/n
                let target = c[(a, b)] * ((n - 1.0) / n);
                t.add(z_score(&prod, target), || format!("block {m}, entry ({a},{b})"));
            }
        }
    }
    let name = match hyp {
        Hypothesis::H0 => "conditional_covariance_h0",
        Hypothesis::H1 => "conditional_covariance_h1",
    };
    Ok(t.finish(name))
}

/// `H0` blocks are uncorrelated with each other.
pub fn h0_cross_block(s: &Scenario, snr_db: f64, trials: usize, seed: u64) -> Result<CheckOutcome> {
    let (noise, _) = scaled_models(s, snr_db)?;
    let g = &s.geometry;
    let mut data = rngs(seed, 4);
    let mut nrng = rngs(seed, 5);
    let mut rows = Vec::with_capacity(trials);
    for _ in 0..trials {
        let tx = draw_symbols(Hypothesis::H0, Layout::Interleaved, &s.sync_word, &s.constellation, g, 0, &mut data);
        rows.push(post_processed(s, &tx, &noise, &mut nrng)?);
    }
    let mut t = Tracker::new();
    for m1 in 0..g.m {
        for m2 in m1 + 1..g.m {
            for a in 0..g.k {
                for b in 0..g.k {
                    let prod: Vec<Complex64> = rows
                        .iter()
                        .map(|r| r[m1 * g.k + a] * r[m2 * g.k + b].conj())
                        .collect();
                    t.add(z_score(&prod, Complex64::new(0.0, 0.0)), || {
                        format!("blocks ({m1},{m2}), entry ({a},{b})")
                    });
                }
            }
        }
    }
    Ok(t.finish("h0_cross_block"))
}

/// Generated noise: pseudo-autocorrelation vanishes and autocorrelation
/// matches the receiver's analytic `c_z` over one period.
pub fn noise_moments(s: &Scenario, trials: usize, seed: u64) -> Result<Vec<CheckOutcome>> {
    let true_noise = &s.noise_shape;
    let rx = s.receiver_shape();
    let p = true_noise.period();
    let lz = true_noise.memory().max(rx.memory());
    let len = p + lz;
    let mut rng = rngs(seed, 6);
    let draws: Vec<Vec<Complex64>> = (0..trials).map(|_| generate_acgn_at(true_noise, 0, len, &mut rng)).collect();
    let mut proper = Tracker::new();
    let mut auto = Tracker::new();
    for m in 0..p {
        for l in 0..=lz {
            let pseudo: Vec<Complex64> = draws.iter().map(|z| z[m + l] * z[m]).collect();
            proper.add(z_score(&pseudo, Complex64::new(0.0, 0.0)), || format!("m = {m}, l = {l}"));
            let corr: Vec<Complex64> = draws.iter().map(|z| z[m + l] * z[m].conj()).collect();
            let target = Complex64::new(rx.autocorrelation(m as i64, l as i64), 0.0);
            auto.add(z_score(&corr, target), || format!("m = {m}, l = {l}"));
        }
    }
    Ok(vec![proper.finish("noise_pseudo_autocorrelation"), auto.finish("noise_autocorrelation")])
}

/// Runs every check with `trials` draws each.
pub fn validation_suite(s: &Scenario, snr_db: f64, trials: usize, seed: u64) -> Result<ValidationReport> {
    if trials < 2 {
        return Err(Error::invalid("trials", "validation needs at least two draws"));
    }
    s.validate()?;
    let mut checks = vec![
        h0_mean_zero(s, snr_db, trials, seed)?,
        conditional_covariance(s, Hypothesis::H0, snr_db, trials, seed)?,
        conditional_covariance(s, Hypothesis::H1, snr_db, trials, seed.wrapping_add(1))?,
        h0_cross_block(s, snr_db, trials, seed)?,
    ];
    checks.extend(noise_moments(s, trials, seed)?);
    Ok(ValidationReport { trials, checks })
}
