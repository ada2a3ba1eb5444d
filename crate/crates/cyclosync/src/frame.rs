//! Constellations, sync words, window generation and post-processing.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{apply_channel, FrameGeometry, LptvChannel};
use crate::cyclostat::{generate_acgn_at, NoiseModel};
use crate::{Error, Result};

/// Finite symbol alphabet with its uniform-law moments.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    symbols: Vec<Complex64>,
    sigma_s2: f64,
    pseudo_var: Complex64,
    gamma_s2: f64,
}

impl Constellation {
    pub fn new(symbols: Vec<Complex64>) -> Result<Self> {
        if symbols.len() < 2 {
            return Err(Error::invalid("constellation", "needs at least two symbols"));
        }
        for (i, a) in symbols.iter().enumerate() {
            if !a.re.is_finite() || !a.im.is_finite() {
                return Err(Error::invalid("constellation", "symbols must be finite"));
            }
            if symbols[..i].iter().any(|b| (a - b).norm() < 1e-12) {
                return Err(Error::invalid("constellation", format!("duplicate symbol {a}")));
            }
        }
        let ns = symbols.len() as f64;
        let mean: Complex64 = symbols.iter().sum::<Complex64>() / ns;
        let scale = symbols.iter().map(|s| s.norm()).fold(0.0, f64::max);
        if mean.norm() > 1e-12 * scale.max(1.0) {
            return Err(Error::invalid("constellation", format!("uniform mean must be zero, got {mean}")));
        }
        let sigma_s2 = symbols.iter().map(|s| s.norm_sqr()).sum::<f64>() / ns;
        let pseudo_var = symbols.iter().map(|s| s * s).sum::<Complex64>() / ns;
        let fourth = symbols.iter().map(|s| s.norm_sqr().powi(2)).sum::<f64>() / ns;
        Ok(Self {
            symbols,
            sigma_s2,
            pseudo_var,
            gamma_s2: fourth / sigma_s2,
        })
    }

    /// `{-1, +1}`.
    pub fn bpsk() -> Self {
        Self::new(vec![Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)]).expect("valid")
    }

    /// Unit-energy QPSK, counter-clockwise from the first quadrant.
    pub fn qpsk() -> Self {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(vec![
            Complex64::new(a, a),
            Complex64::new(-a, a),
            Complex64::new(-a, -a),
            Complex64::new(a, -a),
        ])
        .expect("valid")
    }

    pub fn symbols(&self) -> &[Complex64] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, idx: usize) -> Complex64 {
        self.symbols[idx]
    }

    /// `E|S|^2`.
    pub fn sigma_s2(&self) -> f64 {
        self.sigma_s2
    }

    /// `E{S^2}`.
    pub fn pseudo_variance(&self) -> Complex64 {
        self.pseudo_var
    }

    /// `E|S|^4 / E|S|^2`.
    pub fn gamma_s2(&self) -> f64 {
        self.gamma_s2
    }

    /// Index of the nearest symbol; ties go to the lowest index.
    pub fn nearest(&self, x: Complex64) -> usize {
        let mut best = 0;
        let mut best_d = (x - self.symbols[0]).norm_sqr();
        for (i, s) in self.symbols.iter().enumerate().skip(1) {
            let d = (x - s).norm_sqr();
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        best
    }

    /// Index of the symbol equal to `x` (within 1e-9), if any.
    pub fn index_of(&self, x: Complex64) -> Option<usize> {
        self.symbols.iter().position(|s| (s - x).norm() < 1e-9)
    }

    /// Uniformly drawn symbol index.
    pub fn draw_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        rng.random_range(0..self.symbols.len())
    }
}

/// Synchronization word stored in vector order `[f_{L_sw-1}, ..., f_0]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SyncWord {
    indices: Vec<usize>,
}

impl SyncWord {
    pub fn new(constellation: &Constellation, indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::invalid("sync_word", "must not be empty"));
        }
        if let Some(i) = indices.iter().find(|i| **i >= constellation.len()) {
            return Err(Error::invalid(
                "sync_word",
                format!("symbol index {i} outside a constellation of {}", constellation.len()),
            ));
        }
        Ok(Self { indices })
    }

    /// Builds a sync word from symbol values, each of which must be a
    /// constellation member.
    pub fn from_symbols(constellation: &Constellation, symbols: &[Complex64]) -> Result<Self> {
        let idx = symbols
            .iter()
            .map(|s| {
                constellation
                    .index_of(*s)
                    .ok_or_else(|| Error::invalid("sync_word", format!("{s} is not a constellation symbol")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(constellation, idx)
    }

    /// Sync word number `index` in the mixed-radix enumeration of all
    /// `N_s^{L_sw}` words (digit `j` selects element `j`).
    pub fn from_enumeration(constellation: &Constellation, l_sw: usize, mut index: u64) -> Result<Self> {
        let ns = constellation.len() as u64;
        let idx = (0..l_sw)
            .map(|_| {
                let d = (index % ns) as usize;
                index /= ns;
                d
            })
            .collect();
        Self::new(constellation, idx)
    }

    /// Inverse of [`SyncWord::from_enumeration`].
    pub fn enumeration_index(&self, ns: usize) -> u64 {
        self.indices.iter().rev().fold(0u64, |acc, d| acc * ns as u64 + *d as u64)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn symbols(&self, constellation: &Constellation) -> Vec<Complex64> {
        self.indices.iter().map(|i| constellation.symbol(*i)).collect()
    }

    /// Checks `L_sw = K*M`.
    pub fn check_geometry(&self, geom: &FrameGeometry) -> Result<()> {
        if self.len() != geom.l_sw {
            return Err(Error::invalid(
                "sync_word",
                format!("length {} differs from L_sw = K*M = {}", self.len(), geom.l_sw),
            ));
        }
        Ok(())
    }

    /// Symbol indices of block `t_i = [f_{iK+K-1}, ..., f_{iK}]`.
    pub fn block(&self, i: usize, k: usize) -> &[usize] {
        let m = self.len() / k;
        let start = (m - 1 - i) * k;
        &self.indices[start..start + k]
    }
}

/// `exp(-j pi root n^2 / len)` for even `len`, `exp(-j pi root n (n+1) / len)`
/// for odd `len`.
pub fn zadoff_chu(root: u64, len: usize) -> Vec<Complex64> {
    (0..len as u64)
        .map(|n| {
            let q = if len % 2 == 0 { n * n } else { n * (n + 1) };
            // reduce the phase exactly before converting to floating point
            let r = (root * q) % (2 * len as u64);
            Complex64::from_polar(1.0, -std::f64::consts::PI * r as f64 / len as f64)
        })
        .collect()
}

/// Which transmitted sequence a window carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Hypothesis {
    /// Pure random data.
    H0,
    /// Sync word aligned with the start of the window.
    H1,
}

/// How the sync word is laid out under `H1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Layout {
    /// `L_ch` data symbols are inserted after every `K`-block of the sync word.
    Interleaved,
    /// The sync word is sent as one contiguous run.
    Contiguous,
}

/// Transmitted symbol indices for one window plus the trailing span.
#[derive(Debug, Clone, PartialEq)]
pub struct TxSymbols {
    /// Vector order, length `L_tot + L_ch` (last `L_ch` are the history).
    pub window: Vec<usize>,
    /// Time order, symbols at times `1..=extra_len`.
    pub trailing: Vec<usize>,
    pub truth: Hypothesis,
}

impl TxSymbols {
    /// All symbols in time order, starting at time `-(L_tot + L_ch - 1)`.
    pub fn time_order(&self) -> Vec<usize> {
        self.window.iter().rev().chain(self.trailing.iter()).copied().collect()
    }
}

/// Received samples of one window.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationWindow {
    /// Vector order, length `L_tot`: element `j` is the sample at time `-j`.
    pub samples: Vec<Complex64>,
    /// Time order, samples at times `1..=extra_len`.
    pub trailing: Vec<Complex64>,
    pub truth: Hypothesis,
}

/// Symbol indices `[t_{M-1}, d^0, t_{M-2}, d^1, ..., t_0, d^{M-1}, l]` in
/// vector order; `d` and `l` are uniform random data.
pub fn assemble_sync_indices<R: Rng + ?Sized>(
    sw: &SyncWord,
    constellation: &Constellation,
    geom: &FrameGeometry,
    data_rng: &mut R,
) -> Vec<usize> {
    let mut out = Vec::with_capacity(geom.l_tot + geom.l_ch);
    for b in 0..geom.m {
        out.extend_from_slice(sw.block(geom.m - 1 - b, geom.k));
        for _ in 0..geom.l_ch {
            out.push(constellation.draw_index(data_rng));
        }
    }
    for _ in 0..geom.l_ch {
        out.push(constellation.draw_index(data_rng));
    }
    out
}

/// Symbol values of [`assemble_sync_indices`].
pub fn assemble_sync_sequence<R: Rng + ?Sized>(
    sw: &SyncWord,
    constellation: &Constellation,
    geom: &FrameGeometry,
    data_rng: &mut R,
) -> Vec<Complex64> {
    assemble_sync_indices(sw, constellation, geom, data_rng)
        .into_iter()
        .map(|i| constellation.symbol(i))
        .collect()
}

/// Draws the transmitted symbols for one window.
pub fn draw_symbols<R: Rng + ?Sized>(
    hyp: Hypothesis,
    layout: Layout,
    sw: &SyncWord,
    constellation: &Constellation,
    geom: &FrameGeometry,
    extra_len: usize,
    data_rng: &mut R,
) -> TxSymbols {
    let window = match (hyp, layout) {
        (Hypothesis::H1, Layout::Interleaved) => assemble_sync_indices(sw, constellation, geom, data_rng),
        (Hypothesis::H1, Layout::Contiguous) => {
            let mut w = sw.indices().to_vec();
            while w.len() < geom.l_tot + geom.l_ch {
                w.push(constellation.draw_index(data_rng));
            }
            w
        }
        (Hypothesis::H0, _) => (0..geom.l_tot + geom.l_ch)
            .map(|_| constellation.draw_index(data_rng))
            .collect(),
    };
    let trailing = (0..extra_len).map(|_| constellation.draw_index(data_rng)).collect();
    TxSymbols {
        window,
        trailing,
        truth: hyp,
    }
}

/// Passes transmitted symbols through the channel and adds noise.
pub fn receive<R: Rng + ?Sized>(
    tx: &TxSymbols,
    constellation: &Constellation,
    geom: &FrameGeometry,
    ch: &LptvChannel,
    noise: &NoiseModel,
    noise_rng: &mut R,
) -> Result<ObservationWindow> {
    if tx.window.len() != geom.l_tot + geom.l_ch {
        return Err(Error::Structural(format!(
            "window carries {} symbols, expected L_tot + L_ch = {}",
            tx.window.len(),
            geom.l_tot + geom.l_ch
        )));
    }
    let s: Vec<Complex64> = tx.time_order().into_iter().map(|i| constellation.symbol(i)).collect();
    let n_out = geom.l_tot + tx.trailing.len();
    let start = -(geom.l_tot as i64 - 1);
    let z = generate_acgn_at(noise, start, n_out, noise_rng);
    let r = apply_channel(ch, &s, &z, start)?;
    let mut samples: Vec<Complex64> = r[..geom.l_tot].to_vec();
    samples.reverse();
    Ok(ObservationWindow {
        samples,
        trailing: r[geom.l_tot..].to_vec(),
        truth: tx.truth,
    })
}

/// Draws a complete window under `hyp`.
#[allow(clippy::too_many_arguments)]
pub fn draw_window<R1: Rng + ?Sized, R2: Rng + ?Sized>(
    hyp: Hypothesis,
    sw: &SyncWord,
    constellation: &Constellation,
    geom: &FrameGeometry,
    ch: &LptvChannel,
    noise: &NoiseModel,
    extra_len: usize,
    data_rng: &mut R1,
    noise_rng: &mut R2,
) -> Result<ObservationWindow> {
    let tx = draw_symbols(hyp, Layout::Interleaved, sw, constellation, geom, extra_len, data_rng);
    receive(&tx, constellation, geom, ch, noise, noise_rng)
}

/// Keeps the first `K` samples of each `N`-block: length `L_sw`.
pub fn post_process(samples: &[Complex64], geom: &FrameGeometry) -> Result<Vec<Complex64>> {
    if samples.len() < geom.l_tot {
        return Err(Error::Structural(format!(
            "window has {} samples, post-processing needs L_tot = {}",
            samples.len(),
            geom.l_tot
        )));
    }
    Ok(geom.kept_positions().map(|j| samples[j]).collect())
}
