//! Blind channel acquisition: per-phase CMA equalizer, hard slicing,
//! least-squares CIR estimation and assembly of the estimated `B` matrix.
//!
//! All routines take the equalizer span in time order; its last sample is
//! the reference time `n`, and offsets are counted backwards from `n`.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{build_b_matrix, FrameGeometry, LptvChannel};
use crate::frame::Constellation;
use crate::linalg::{from_fn, least_squares};
use crate::{CMatrix, Error, Result};

/// Tap magnitude treated as divergence.
pub const DIVERGENCE_LIMIT: f64 = 1e6;
pub const DEFAULT_STEP: f64 = 2e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EqualizerConfig {
    pub delta_p: f64,
    pub l_eq: usize,
    pub xi: usize,
    pub gamma_s2: f64,
    pub p_h: usize,
    pub l_ch: usize,
    /// Iterations per phase budget, `L_EQ / P_h`.
    pub j: usize,
    /// Smallest integer with `psi * P_h > L_ch + 1`.
    pub psi: usize,
    /// Number of least-squares rows minus one.
    pub omega: usize,
    /// Number of sliced symbols, `L_EQ - P_h L_ch`.
    pub l_est: usize,
}

impl EqualizerConfig {
    /// Derives `J`, `psi`, `omega` and `L_est`. `omega_override` replaces the
    /// derived `omega = J - (L_ch + psi)` by a smaller value.
    pub fn new(
        delta_p: f64,
        l_eq: usize,
        xi: usize,
        gamma_s2: f64,
        p_h: usize,
        l_ch: usize,
        omega_override: Option<usize>,
    ) -> Result<Self> {
        if !(delta_p >= 0.0) || !delta_p.is_finite() {
            return Err(Error::invalid("equalizer.delta_p", "must be finite and nonnegative"));
        }
        if !(gamma_s2 > 0.0) {
            return Err(Error::invalid("equalizer.gamma_s2", "must be positive"));
        }
        if p_h == 0 || l_eq == 0 || l_eq % p_h != 0 {
            return Err(Error::invalid(
                "equalizer.L_EQ",
                format!("L_EQ = {l_eq} must be a positive multiple of P_h = {p_h}"),
            ));
        }
        let j = l_eq / p_h;
        if xi < 3 {
            return Err(Error::invalid("equalizer.xi", format!("xi >= 3 violated (xi = {xi})")));
        }
        if j != xi * (l_ch + 1) {
            return Err(Error::invalid(
                "equalizer.xi",
                format!("J = L_EQ / P_h = {j} must equal xi * (L_ch + 1) = {}", xi * (l_ch + 1)),
            ));
        }
        let psi = (l_ch + 1) / p_h + 1;
        if psi * p_h < l_ch + p_h {
            return Err(Error::invalid(
                "equalizer",
                format!("psi = {psi} leaves the regressor outside the sliced span for P_h = {p_h}, L_ch = {l_ch}"),
            ));
        }
        let derived = j as i64 - (l_ch + psi) as i64;
        if derived < 1 {
            return Err(Error::invalid("equalizer.omega", format!("omega = J - (L_ch + psi) = {derived} < 1")));
        }
        let omega = match omega_override {
            None => derived as usize,
            Some(o) if o >= 1 && o as i64 <= derived => o,
            Some(o) => {
                return Err(Error::invalid(
                    "equalizer.omega",
                    format!("override {o} outside 1..={derived}"),
                ))
            }
        };
        Ok(Self {
            delta_p,
            l_eq,
            xi,
            gamma_s2,
            p_h,
            l_ch,
            j,
            psi,
            omega,
            l_est: l_eq - p_h * l_ch,
        })
    }

    fn check_span(&self, received: &[Complex64]) -> Result<()> {
        if received.len() != self.l_eq {
            return Err(Error::Structural(format!(
                "equalizer span has {} samples, expected L_EQ = {}",
                received.len(),
                self.l_eq
            )));
        }
        Ok(())
    }

    /// `[r[n - o - j P_h]]_{j=0..=L_ch}` for offset `o`.
    fn regressor<'a>(&'a self, received: &'a [Complex64], o: usize) -> impl Iterator<Item = Complex64> + 'a {
        let last = received.len() - 1;
        (0..=self.l_ch).map(move |jj| received[last - o - jj * self.p_h])
    }
}

/// Per-phase equalizer taps.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualizerState {
    pub taps: Vec<Vec<Complex64>>,
    pub iterations: usize,
}

impl EqualizerState {
    /// `[1, 0, ..., 0]` for every phase.
    pub fn initial(cfg: &EqualizerConfig) -> Self {
        let mut u = vec![Complex64::new(0.0, 0.0); cfg.l_ch + 1];
        u[0] = Complex64::new(1.0, 0.0);
        Self {
            taps: vec![u; cfg.p_h],
            iterations: 0,
        }
    }

    fn output(&self, cfg: &EqualizerConfig, received: &[Complex64], phase: usize, k: usize) -> Complex64 {
        self.taps[phase]
            .iter()
            .zip(cfg.regressor(received, k * cfg.p_h + phase))
            .map(|(u, r)| u * r)
            .sum()
    }
}

/// Godard/CMA training: `u <- u + delta conj(r) d (gamma - |d|^2)`, `d = u^T r`.
pub fn cma_train(received: &[Complex64], cfg: &EqualizerConfig) -> Result<EqualizerState> {
    cfg.check_span(received)?;
    let mut state = EqualizerState::initial(cfg);
    let iters = cfg.j - (cfg.l_ch + 1);
    for phase in 0..cfg.p_h {
        for k in 0..iters {
            let d = state.output(cfg, received, phase, k);
            let err = d * (cfg.gamma_s2 - d.norm_sqr()) * cfg.delta_p;
            let regs: Vec<Complex64> = cfg.regressor(received, k * cfg.p_h + phase).collect();
            for (u, r) in state.taps[phase].iter_mut().zip(regs) {
                *u += r.conj() * err;
            }
            if state.taps[phase].iter().any(|u| !(u.norm() <= DIVERGENCE_LIMIT)) {
                return Err(Error::NumericalDivergence(format!(
                    "equalizer taps of phase {phase} exceeded {DIVERGENCE_LIMIT:e} after {} updates; reduce delta_p (currently {})",
                    k + 1,
                    cfg.delta_p
                )));
            }
        }
    }
    state.iterations = iters;
    Ok(state)
}

/// Equalizes and slices the span. Returns `L_est` symbol indices in time
/// order; the last one is the estimate at time `n`.
pub fn equalize_and_slice(
    received: &[Complex64],
    state: &EqualizerState,
    cfg: &EqualizerConfig,
    constellation: &Constellation,
) -> Result<Vec<usize>> {
    cfg.check_span(received)?;
    let mut out = vec![0usize; cfg.l_est];
    for k in 0..cfg.j - cfg.l_ch {
        for phase in 0..cfg.p_h {
            let o = k * cfg.p_h + phase;
            out[cfg.l_est - 1 - o] = constellation.nearest(state.output(cfg, received, phase, k));
        }
    }
    Ok(out)
}

/// Least-squares CIR per phase from the received span and symbol estimates
/// (time order, length `L_est`, aligned so the last estimate is at time `n`).
/// Entry `i` estimates the response at time `n - i`.
pub fn lsse_cir(received: &[Complex64], s_hat: &[Complex64], cfg: &EqualizerConfig) -> Result<Vec<Vec<Complex64>>> {
    cfg.check_span(received)?;
    if s_hat.len() != cfg.l_est {
        return Err(Error::Structural(format!(
            "{} symbol estimates given, expected L_est = {}",
            s_hat.len(),
            cfg.l_est
        )));
    }
    let s_last = s_hat.len() - 1;
    let r_last = received.len() - 1;
    (0..cfg.p_h)
        .map(|i| {
            let g = from_fn(cfg.omega + 1, cfg.l_ch + 1, |a1, a2| s_hat[s_last - (a1 * cfg.p_h + a2 + i)]);
            let target = DVector::from_fn(cfg.omega + 1, |a1, _| received[r_last - (a1 * cfg.p_h + i)]);
            least_squares(&g, &target).map(|h| h.iter().copied().collect())
        })
        .collect()
}

/// Places per-phase estimates into the `K x N` block layout. `anchor_time`
/// is the absolute time of the span's last sample (relative to the window
/// origin), so estimate `i` belongs to time `anchor_time - i`.
pub fn assemble_b_hat(h_hat: &[Vec<Complex64>], geom: &FrameGeometry, anchor_time: i64) -> Result<CMatrix> {
    if h_hat.len() != geom.p_h {
        return Err(Error::Structural(format!(
            "{} phase estimates given, expected P_h = {}",
            h_hat.len(),
            geom.p_h
        )));
    }
    if h_hat.iter().any(|h| h.len() != geom.l_ch + 1) {
        return Err(Error::Structural(format!("each estimate needs L_ch + 1 = {} taps", geom.l_ch + 1)));
    }
    let p = geom.p_h as i64;
    let mut coeffs = vec![Vec::new(); geom.p_h];
    for (i, h) in h_hat.iter().enumerate() {
        coeffs[(anchor_time - i as i64).rem_euclid(p) as usize] = h.clone();
    }
    let ch = LptvChannel::new_unchecked_memory(coeffs)?;
    Ok(build_b_matrix(&ch, geom, 0))
}

/// Output of the full blind acquisition chain.
#[derive(Debug, Clone)]
pub struct ChannelEstimate {
    pub state: EqualizerState,
    pub symbols: Vec<usize>,
    pub taps: Vec<Vec<Complex64>>,
    pub b_hat: CMatrix,
}

/// Trains, slices, estimates and assembles `B_hat` from the `L_EQ` samples
/// that follow the window (times `1..=L_EQ`).
pub fn estimate_channel(
    trailing: &[Complex64],
    cfg: &EqualizerConfig,
    constellation: &Constellation,
    geom: &FrameGeometry,
) -> Result<ChannelEstimate> {
    let state = cma_train(trailing, cfg)?;
    let symbols = equalize_and_slice(trailing, &state, cfg, constellation)?;
    let values: Vec<Complex64> = symbols.iter().map(|i| constellation.symbol(*i)).collect();
    let taps = lsse_cir(trailing, &values, cfg)?;
    let b_hat = assemble_b_hat(&taps, geom, trailing.len() as i64)?;
    Ok(ChannelEstimate {
        state,
        symbols,
        taps,
        b_hat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantities() {
        let c = EqualizerConfig::new(1e-3, 300, 100, 1.0, 1, 2, None).unwrap();
        assert_eq!((c.j, c.psi, c.omega, c.l_est), (300, 4, 294, 298));
        let c2 = EqualizerConfig::new(1e-3, 300, 50, 1.0, 2, 2, None).unwrap();
        assert_eq!((c2.j, c2.psi, c2.omega, c2.l_est), (150, 2, 146, 296));
        let c3 = EqualizerConfig::new(1e-3, 300, 100, 1.0, 1, 2, Some(4)).unwrap();
        assert_eq!(c3.omega, 4);
    }

    #[test]
    fn config_rejections() {
        assert!(EqualizerConfig::new(1e-3, 301, 100, 1.0, 2, 2, None).is_err());
        assert!(EqualizerConfig::new(1e-3, 300, 99, 1.0, 1, 2, None).is_err());
        assert!(EqualizerConfig::new(1e-3, 6, 2, 1.0, 1, 2, None).is_err());
        assert!(EqualizerConfig::new(-1.0, 300, 100, 1.0, 1, 2, None).is_err());
        assert!(EqualizerConfig::new(1e-3, 300, 100, 1.0, 1, 2, Some(0)).is_err());
        assert!(EqualizerConfig::new(1e-3, 300, 100, 1.0, 1, 2, Some(295)).is_err());
        // P_h = 4 with L_ch = 2 would need symbols before the sliced span
        assert!(EqualizerConfig::new(1e-3, 36, 3, 1.0, 4, 2, None).is_err());
    }

    #[test]
    fn wrong_span_length() {
        let c = EqualizerConfig::new(1e-3, 9, 3, 1.0, 1, 2, None).unwrap();
        assert!(cma_train(&[Complex64::new(1.0, 0.0); 8], &c).is_err());
    }
}
