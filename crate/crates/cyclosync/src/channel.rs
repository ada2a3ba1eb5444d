//! LPTV channel model, frame geometry, the pre-processing matrix `A`, the
//! per-block channel matrix `B` and SNR calibration.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cyclostat::NoiseModel;
use crate::linalg::from_fn;
use crate::{CMatrix, Error, Result};

/// Periodic channel impulse response `h[m,l] = coeffs[m mod P_h][l]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelSpec", into = "ChannelSpec")]
pub struct LptvChannel {
    coeffs: Vec<Vec<Complex64>>,
}

/// Serialized form `{period, memory, taps}` with taps as `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub period: usize,
    pub memory: usize,
    pub taps: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<ChannelSpec> for LptvChannel {
    type Error = Error;

    fn try_from(s: ChannelSpec) -> Result<Self> {
        if s.taps.len() != s.period {
            return Err(Error::invalid(
                "channel.taps",
                format!("expected {} phases (period), got {}", s.period, s.taps.len()),
            ));
        }
        if let Some(row) = s.taps.iter().find(|r| r.len() != s.memory + 1) {
            return Err(Error::invalid(
                "channel.taps",
                format!("each phase needs memory+1 = {} taps, got {}", s.memory + 1, row.len()),
            ));
        }
        LptvChannel::new(
            s.taps
                .into_iter()
                .map(|r| r.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
                .collect(),
        )
    }
}

impl From<LptvChannel> for ChannelSpec {
    fn from(c: LptvChannel) -> Self {
        ChannelSpec {
            period: c.period(),
            memory: c.memory(),
            taps: c
                .coeffs
                .iter()
                .map(|r| r.iter().map(|v| [v.re, v.im]).collect())
                .collect(),
        }
    }
}

impl LptvChannel {
    /// Validated channel. Every phase must have the same number of taps, and
    /// both the first and last lag must be nonzero for at least one phase.
    pub fn new(coeffs: Vec<Vec<Complex64>>) -> Result<Self> {
        let ch = Self::new_unchecked_memory(coeffs)?;
        let lh = ch.memory();
        if ch.coeffs.iter().all(|r| r[0] == Complex64::new(0.0, 0.0)) {
            return Err(Error::invalid("channel.taps", "h[i][0] is zero for every phase"));
        }
        if ch.coeffs.iter().all(|r| r[lh] == Complex64::new(0.0, 0.0)) {
            return Err(Error::invalid(
                "channel.taps",
                "last tap is zero for every phase; memory is overstated",
            ));
        }
        Ok(ch)
    }

    /// Channel that only checks shape. Used for estimated channels, whose
    /// trailing taps may legitimately be zero.
    pub fn new_unchecked_memory(coeffs: Vec<Vec<Complex64>>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("channel.period", "must be positive"));
        }
        let len = coeffs[0].len();
        if len == 0 {
            return Err(Error::invalid("channel.taps", "needs at least one tap per phase"));
        }
        if coeffs.iter().any(|r| r.len() != len) {
            return Err(Error::invalid("channel.taps", "all phases must have the same length"));
        }
        if coeffs.iter().flatten().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::invalid("channel.taps", "taps must be finite"));
        }
        Ok(Self { coeffs })
    }

    /// Linear time-invariant channel.
    pub fn lti(taps: Vec<Complex64>) -> Result<Self> {
        Self::new(vec![taps])
    }

    pub fn period(&self) -> usize {
        self.coeffs.len()
    }

    pub fn memory(&self) -> usize {
        self.coeffs[0].len() - 1
    }

    pub fn phases(&self) -> &[Vec<Complex64>] {
        &self.coeffs
    }

    /// `h[m,l]`, zero for lags beyond the memory.
    pub fn tap(&self, m: i64, l: usize) -> Complex64 {
        let row = &self.coeffs[m.rem_euclid(self.period() as i64) as usize];
        row.get(l).copied().unwrap_or_default()
    }
}

/// Structural integers of the synchronization window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameGeometry {
    pub p_h: usize,
    pub p_z: usize,
    pub l_h: usize,
    pub l_z: usize,
    pub l_ch: usize,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub l_sw: usize,
    pub l_tot: usize,
}

impl FrameGeometry {
    /// Fully validated geometry.
    pub fn new(p_h: usize, p_z: usize, l_h: usize, l_z: usize, n: usize, m: usize) -> Result<Self> {
        let g = Self::new_relaxed(p_h, p_z, l_h, l_z, n, m)?;
        if g.l_sw <= g.l_ch + 1 {
            return Err(Error::invalid(
                "geometry",
                format!("L_sw > L_ch + 1 violated (L_sw = {}, L_ch = {})", g.l_sw, g.l_ch),
            ));
        }
        Ok(g)
    }

    /// Geometry without the `L_sw > L_ch + 1` requirement. That condition is
    /// only needed by the blind channel estimator; detector-level checks on
    /// very small instances use this constructor.
    pub fn new_relaxed(p_h: usize, p_z: usize, l_h: usize, l_z: usize, n: usize, m: usize) -> Result<Self> {
        if p_h == 0 || p_z == 0 {
            return Err(Error::invalid("geometry", "periods P_h and P_z must be positive"));
        }
        if m == 0 {
            return Err(Error::invalid("geometry.M", "must be positive"));
        }
        let l_ch = l_h.max(l_z);
        if l_ch == 0 {
            return Err(Error::invalid("geometry", "L_ch = max(L_h, L_z) must be positive"));
        }
        if n <= l_ch {
            return Err(Error::invalid(
                "geometry.N",
                format!("N > L_ch violated (N = {n}, L_ch = {l_ch})"),
            ));
        }
        if n % p_h != 0 || n % p_z != 0 {
            return Err(Error::invalid(
                "geometry.N",
                format!("N = {n} must be a common multiple of P_h = {p_h} and P_z = {p_z}"),
            ));
        }
        let k = n - l_ch;
        Ok(Self {
            p_h,
            p_z,
            l_h,
            l_z,
            l_ch,
            n,
            k,
            m,
            l_sw: k * m,
            l_tot: n * m,
        })
    }

    /// Geometry implied by a channel and a noise model.
    pub fn from_models(ch: &LptvChannel, noise: &NoiseModel, n: usize, m: usize) -> Result<Self> {
        Self::new(ch.period(), noise.period(), ch.memory(), noise.memory(), n, m)
    }

    /// Window positions (vector order) that survive post-processing.
    pub fn kept_positions(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.m).flat_map(move |b| (b * self.n)..(b * self.n + self.k))
    }
}

/// Time-varying convolution `r[t] = sum_l h[t,l] s[t-l] + z[t]`.
///
/// `s` is in time order and carries `s.len() - z.len()` history samples
/// before the first output time `start_time`.
pub fn apply_channel(
    ch: &LptvChannel,
    s: &[Complex64],
    z: &[Complex64],
    start_time: i64,
) -> Result<Vec<Complex64>> {
    let lh = ch.memory();
    if s.len() < z.len() + lh {
        return Err(Error::Structural(format!(
            "apply_channel needs {} symbols ({} outputs + {lh} history), got {}",
            z.len() + lh,
            z.len(),
            s.len()
        )));
    }
    let hist = s.len() - z.len();
    Ok(z.iter()
        .enumerate()
        .map(|(i, zi)| {
            let t = start_time + i as i64;
            let mut acc = *zi;
            for l in 0..=lh {
                acc += ch.tap(t, l) * s[hist + i - l];
            }
            acc
        })
        .collect())
}

/// `K x N` block matrix: row `k` holds `h[t0 - k, 0..=L_ch]` from column `k`.
pub fn build_b_matrix(ch: &LptvChannel, geom: &FrameGeometry, block_start_time: i64) -> CMatrix {
    from_fn(geom.k, geom.n, |row, col| {
        if col >= row && col - row <= geom.l_ch {
            ch.tap(block_start_time - row as i64, col - row)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `L_tot x (L_tot + L_ch)` pre-processing matrix: row `k` holds
/// `h[-k, 0..=L_ch]` from column `k`.
pub fn build_a_matrix(ch: &LptvChannel, geom: &FrameGeometry) -> CMatrix {
    from_fn(geom.l_tot, geom.l_tot + geom.l_ch, |row, col| {
        if col >= row && col - row <= geom.l_ch {
            ch.tap(-(row as i64), col - row)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Linear SNR `sigma_s^2 Tr{A^H A} / sum_k c_z[-k, 0]` over one window.
pub fn compute_snr(ch: &LptvChannel, geom: &FrameGeometry, noise: &NoiseModel, sigma_s2: f64) -> Result<f64> {
    if !(sigma_s2 > 0.0) {
        return Err(Error::invalid("sigma_s2", "must be positive"));
    }
    let mut signal = 0.0;
    let mut noise_power = 0.0;
    for k in 0..geom.l_tot as i64 {
        for l in 0..=geom.l_ch {
            signal += ch.tap(-k, l).norm_sqr();
        }
        noise_power += noise.autocorrelation(-k, 0);
    }
    if !(noise_power > 0.0) {
        return Err(Error::ModelConsistency("zero noise power in SNR".into()));
    }
    Ok(sigma_s2 * signal / noise_power)
}

/// Variance multiplier that brings `noise_shape` to `target_snr_db`.
pub fn calibrate_noise_power(
    ch: &LptvChannel,
    geom: &FrameGeometry,
    noise_shape: &NoiseModel,
    sigma_s2: f64,
    target_snr_db: f64,
) -> Result<f64> {
    if !target_snr_db.is_finite() {
        return Err(Error::invalid("snr_db", "must be finite"));
    }
    let base = compute_snr(ch, geom, noise_shape, sigma_s2)?;
    Ok(base / 10f64.powf(target_snr_db / 10.0))
}

/// Converts decibels to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
