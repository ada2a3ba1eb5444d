#![allow(dead_code)]
//! Brute-force oracles shared by the detector and acceptance tests.

use cyclosync::channel::{build_b_matrix, FrameGeometry, LptvChannel};
use cyclosync::detectors::CandidateIndexing;
use cyclosync::frame::{Constellation, SyncWord};
use cyclosync::{CMatrix, Complex64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn gauss(rng: &mut ChaCha8Rng) -> Complex64 {
    let a: f64 = rng.sample(rand_distr::StandardNormal);
    let b: f64 = rng.sample(rand_distr::StandardNormal);
    c(a, b)
}

/// A small detection problem with everything the oracles need.
pub struct Instance {
    pub constellation: Constellation,
    pub geom: FrameGeometry,
    pub b: CMatrix,
    pub c_inv: CMatrix,
    pub sw: SyncWord,
}

impl Instance {
    pub fn idx(&self) -> CandidateIndexing {
        CandidateIndexing::new(&self.constellation, &self.geom)
    }

    pub fn random(rng: &mut ChaCha8Rng, constellation: Constellation, geom: FrameGeometry) -> Self {
        let coeffs: Vec<Vec<Complex64>> = (0..geom.p_h)
            .map(|_| {
                let mut t: Vec<Complex64> = (0..=geom.l_ch).map(|_| gauss(rng) * 0.5).collect();
                t[0] += c(1.0, 0.0);
                t[geom.l_ch] += c(0.0, 0.3);
                t
            })
            .collect();
        let ch = LptvChannel::new(coeffs).unwrap();
        let b = build_b_matrix(&ch, &geom, 0);
        let x = CMatrix::from_fn(geom.k, geom.k, |_, _| gauss(rng) * 0.4);
        let cz = &x * x.adjoint() + CMatrix::identity(geom.k, geom.k) * c(0.5, 0.0);
        let c_inv = cz.try_inverse().unwrap();
        let sw_idx: Vec<usize> = (0..geom.l_sw).map(|_| rng.random_range(0..constellation.len())).collect();
        let sw = SyncWord::new(&constellation, sw_idx).unwrap();
        Self {
            constellation,
            geom,
            b,
            c_inv,
            sw,
        }
    }

    /// Full quadratic `sum_m (r_m - B s_m)^H C^-1 (r_m - B s_m)` for a symbol
    /// vector in vector order (length `L_tot`).
    pub fn quad(&self, r_p: &[Complex64], s: &[Complex64]) -> f64 {
        let g = &self.geom;
        let mut total = 0.0;
        for m in 0..g.m {
            let e: Vec<Complex64> = (0..g.k)
                .map(|row| r_p[m * g.k + row] - (0..g.n).map(|col| self.b[(row, col)] * s[m * g.n + col]).sum::<Complex64>())
                .collect();
            for a in 0..g.k {
                for bb in 0..g.k {
                    total += (e[a].conj() * self.c_inv[(a, bb)] * e[bb]).re;
                }
            }
        }
        total
    }

    /// Every data vector, digit `p` of index `l` being `floor(l / N_s^p) mod N_s`.
    pub fn data_vectors(&self) -> Vec<Vec<Complex64>> {
        let ns = self.constellation.len();
        let count = ns.pow(self.geom.l_tot as u32);
        (0..count)
            .map(|l| {
                (0..self.geom.l_tot)
                    .map(|p| self.constellation.symbol(l / ns.pow(p as u32) % ns))
                    .collect()
            })
            .collect()
    }

    /// Every sync-hypothesis vector: sync word at the kept positions, free fills.
    pub fn sw_vectors(&self) -> Vec<Vec<Complex64>> {
        let g = &self.geom;
        let ns = self.constellation.len();
        let sw = self.sw.symbols(&self.constellation);
        let count = ns.pow((g.m * g.l_ch) as u32);
        (0..count)
            .map(|u| {
                let mut v = Vec::with_capacity(g.l_tot);
                for m in 0..g.m {
                    v.extend_from_slice(&sw[m * g.k..(m + 1) * g.k]);
                    for j in 0..g.l_ch {
                        v.push(self.constellation.symbol(u / ns.pow((m * g.l_ch + j) as u32) % ns));
                    }
                }
                v
            })
            .collect()
    }

    pub fn random_window(&self, rng: &mut ChaCha8Rng, scale: f64) -> Vec<Complex64> {
        (0..self.geom.l_sw).map(|_| gauss(rng) * scale).collect()
    }
}

pub fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

pub fn oracle_lrt(inst: &Instance, r_p: &[Complex64]) -> f64 {
    let d: Vec<f64> = inst.data_vectors().iter().map(|s| -inst.quad(r_p, s)).collect();
    let s: Vec<f64> = inst.sw_vectors().iter().map(|s| -inst.quad(r_p, s)).collect();
    log_sum_exp(&d) - log_sum_exp(&s)
}

pub fn oracle_alrt(inst: &Instance, r_p: &[Complex64]) -> f64 {
    let min = |v: Vec<Vec<Complex64>>| v.iter().map(|s| inst.quad(r_p, s)).fold(f64::INFINITY, f64::min);
    let count = (inst.constellation.len() as f64).powi(inst.geom.l_tot as i32);
    (min(inst.sw_vectors()) - min(inst.data_vectors())) / count
}

pub fn tiny(rng: &mut ChaCha8Rng) -> Instance {
    let g = FrameGeometry::new_relaxed(1, 1, 1, 0, 2, 1).unwrap();
    Instance::random(rng, Constellation::bpsk(), g)
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
