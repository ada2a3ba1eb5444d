//! Candidate enumeration and the `D` matrices.

use num_complex::Complex64;

use crate::channel::FrameGeometry;
use crate::frame::{Constellation, SyncWord};
use crate::{CMatrix, Error, Result};

/// Default cap on materialized candidate counts.
pub const DEFAULT_MATERIALIZATION_CAP: u64 = 1 << 20;

/// Mixed-radix enumeration of data and sync-word candidate vectors.
///
/// A block candidate `a_q` (length `N`) has coordinate `d` equal to symbol
/// `floor(q / N_s^d) mod N_s`. A joint index `l` over `L_tot` symbols splits
/// into block indices `q(l,m) = floor(l / N_s^{mN}) mod N_s^N`; sync-word
/// fills use `q~(u,m) = floor(u / N_s^{m L_ch}) mod N_s^{L_ch}`.
#[derive(Debug, Clone)]
pub struct CandidateIndexing {
    symbols: Vec<Complex64>,
    pub n_s: usize,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub l_ch: usize,
    pub l_tot: usize,
}

fn checked_pow(base: usize, exp: usize) -> Option<u64> {
    (base as u64).checked_pow(exp as u32)
}

impl CandidateIndexing {
    pub fn new(constellation: &Constellation, geom: &FrameGeometry) -> Self {
        Self {
            symbols: constellation.symbols().to_vec(),
            n_s: constellation.len(),
            n: geom.n,
            k: geom.k,
            m: geom.m,
            l_ch: geom.l_ch,
            l_tot: geom.l_tot,
        }
    }

    pub fn symbols(&self) -> &[Complex64] {
        &self.symbols
    }

    /// `N_s^N`, or `None` on overflow.
    pub fn block_count(&self) -> Option<u64> {
        checked_pow(self.n_s, self.n)
    }

    /// `N_s^{L_ch}`.
    pub fn fill_count(&self) -> Option<u64> {
        checked_pow(self.n_s, self.l_ch)
    }

    /// `N_s^{L_tot}`.
    pub fn data_count(&self) -> Option<u64> {
        checked_pow(self.n_s, self.l_tot)
    }

    /// `N_s^{M L_ch}`.
    pub fn sw_count(&self) -> Option<u64> {
        checked_pow(self.n_s, self.m * self.l_ch)
    }

    /// `N_s^{L_tot}` as a float (never overflows).
    pub fn data_count_f64(&self) -> f64 {
        (self.n_s as f64).powi(self.l_tot as i32)
    }

    /// `q(l,m)`.
    pub fn data_block_index(&self, l: u64, m: usize) -> u64 {
        let bc = self.block_count().expect("block count fits u64");
        (l / bc.pow(m as u32)) % bc
    }

    /// `q~(u,m)`.
    pub fn sw_block_index(&self, u: u64, m: usize) -> u64 {
        let fc = self.fill_count().expect("fill count fits u64");
        (u / fc.pow(m as u32)) % fc
    }

    /// Digit expansion of `q` into `len` symbol indices.
    pub fn digits(&self, mut q: u64, len: usize) -> Vec<usize> {
        (0..len)
            .map(|_| {
                let d = (q % self.n_s as u64) as usize;
                q /= self.n_s as u64;
                d
            })
            .collect()
    }

    /// Inverse of [`CandidateIndexing::digits`].
    pub fn index_of_digits(&self, digits: &[usize]) -> u64 {
        digits.iter().rev().fold(0u64, |acc, d| acc * self.n_s as u64 + *d as u64)
    }

    /// Data block candidate `a_q`.
    pub fn data_block(&self, q: u64) -> Vec<Complex64> {
        self.digits(q, self.n).into_iter().map(|d| self.symbols[d]).collect()
    }

    /// Sync-word block candidate `[t_{M-1-m}; fill digits of q~]`.
    pub fn sw_block(&self, fill: u64, m: usize, sw: &SyncWord) -> Vec<Complex64> {
        let mut v: Vec<Complex64> = sw
            .block(self.m - 1 - m, self.k)
            .iter()
            .map(|i| self.symbols[*i])
            .collect();
        v.extend(self.digits(fill, self.l_ch).into_iter().map(|d| self.symbols[d]));
        v
    }

    /// Stacked `L_tot` data candidate `b_l`.
    pub fn data_vector(&self, l: u64) -> Vec<Complex64> {
        (0..self.m).flat_map(|m| self.data_block(self.data_block_index(l, m))).collect()
    }

    /// Stacked `L_tot` sync-word candidate `b~_u`.
    pub fn sw_vector(&self, u: u64, sw: &SyncWord) -> Vec<Complex64> {
        (0..self.m)
            .flat_map(|m| self.sw_block(self.sw_block_index(u, m), m, sw))
            .collect()
    }
}

/// Materialized `D` matrices for every joint data and sync-word hypothesis.
#[derive(Debug, Clone)]
pub struct DMatrices {
    pub data: Vec<CMatrix>,
    pub sw: Vec<CMatrix>,
}

fn outer_sum(blocks: impl Iterator<Item = Vec<Complex64>>, n: usize) -> CMatrix {
    let mut d = CMatrix::zeros(n, n);
    for a in blocks {
        for i in 0..n {
            for j in 0..n {
                d[(i, j)] += a[i] * a[j].conj();
            }
        }
    }
    d
}

/// `D^data_l = sum_m a_{q(l,m)} a_{q(l,m)}^H` and the sync-word analogue.
pub fn build_d_matrices(idx: &CandidateIndexing, sw: &SyncWord, cap: u64) -> Result<DMatrices> {
    let too_many = || {
        Error::Resource(format!(
            "N_s^L_tot = {}^{} candidates exceed the materialization cap {cap}; use the per-block evaluation path",
            idx.n_s, idx.l_tot
        ))
    };
    let n_data = idx.data_count().ok_or_else(too_many)?;
    let n_sw = idx.sw_count().ok_or_else(too_many)?;
    if n_data > cap || n_sw > cap {
        return Err(too_many());
    }
    let data = (0..n_data)
        .map(|l| outer_sum((0..idx.m).map(|m| idx.data_block(idx.data_block_index(l, m))), idx.n))
        .collect();
    let swm = (0..n_sw)
        .map(|u| outer_sum((0..idx.m).map(|m| idx.sw_block(idx.sw_block_index(u, m), m, sw)), idx.n))
        .collect();
    Ok(DMatrices { data, sw: swm })
}
