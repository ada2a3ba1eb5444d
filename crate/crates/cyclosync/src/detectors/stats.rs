//! LRT, ALRT, RALRT and SALRT statistics.
//!
//! The quadratic objective and every candidate set factor over the `M`
//! post-processed blocks, so sums of exponentials and minima over joint
//! hypotheses are evaluated as sums of per-block quantities.

use num_complex::Complex64;

use super::grids::GridSets;
use super::indexing::{CandidateIndexing, DMatrices};
use crate::frame::SyncWord;
use crate::linalg::quad_form;
use crate::{CMatrix, Error, Result};

/// Whitened block model `G = B^H C^-1 B`, `P = C^-1 B`.
#[derive(Debug, Clone)]
pub struct BlockModel {
    b: CMatrix,
    c_inv: CMatrix,
    proj: CMatrix,
    gram: CMatrix,
}

impl BlockModel {
    pub fn new(b: CMatrix, c_inv: CMatrix) -> Result<Self> {
        if c_inv.nrows() != c_inv.ncols() || c_inv.nrows() != b.nrows() {
            return Err(Error::Structural(format!(
                "B is {}x{} but C^-1 is {}x{}",
                b.nrows(),
                b.ncols(),
                c_inv.nrows(),
                c_inv.ncols()
            )));
        }
        let proj = &c_inv * &b;
        let gram = b.adjoint() * &proj;
        let gram = (&gram + gram.adjoint()).map(|v| v * 0.5);
        Ok(Self { b, c_inv, proj, gram })
    }

    pub fn b(&self) -> &CMatrix {
        &self.b
    }

    pub fn c_inv(&self) -> &CMatrix {
        &self.c_inv
    }

    pub fn gram(&self) -> &CMatrix {
        &self.gram
    }

    pub fn k(&self) -> usize {
        self.b.nrows()
    }

    pub fn n(&self) -> usize {
        self.b.ncols()
    }

    /// `y = B^H C^-1 r`.
    pub fn project(&self, r_block: &[Complex64]) -> Vec<Complex64> {
        (0..self.n())
            .map(|c| {
                (0..self.k())
                    .map(|row| self.proj[(row, c)].conj() * r_block[row])
                    .sum()
            })
            .collect()
    }

    /// `r^H C^-1 r`.
    pub fn energy(&self, r_block: &[Complex64]) -> f64 {
        quad_form(&self.c_inv, r_block)
    }
}

/// `Re(y_d^* s)` for every coordinate `d` and symbol `s` of one block.
struct LinearTerms {
    n_s: usize,
    values: Vec<f64>,
}

impl LinearTerms {
    fn new(y: &[Complex64], symbols: &[Complex64]) -> Self {
        let n_s = symbols.len();
        let values = y
            .iter()
            .flat_map(|yd| symbols.iter().map(move |s| (yd.conj() * s).re))
            .collect();
        Self { n_s, values }
    }

    fn at(&self, coord: usize, sym: usize) -> f64 {
        self.values[coord * self.n_s + sym]
    }

    /// `Re(y^H a)` for a digit vector starting at coordinate `offset`.
    fn of_digits(&self, offset: usize, digits: impl Iterator<Item = usize>) -> f64 {
        digits.enumerate().map(|(d, s)| self.at(offset + d, s)).sum()
    }

    /// `Re(y^H a_q)` for every `q` over coordinates `offset..offset+len`.
    fn all(&self, offset: usize, len: usize) -> Vec<f64> {
        let mut out = vec![0.0];
        for d in 0..len {
            let prev = out;
            out = Vec::with_capacity(prev.len() * self.n_s);
            for s in 0..self.n_s {
                let add = self.at(offset + d, s);
                out.extend(prev.iter().map(|v| v + add));
            }
        }
        out
    }
}

/// Precomputed `a^H G a` for every block candidate of a known channel.
#[derive(Debug, Clone)]
pub struct TraceTables {
    /// Indexed by data block index `q`.
    pub data: Vec<f64>,
    /// Indexed by block `m`, then fill index `q~`.
    pub sw: Vec<Vec<f64>>,
}

impl TraceTables {
    pub fn new(model: &BlockModel, idx: &CandidateIndexing, sw: &SyncWord, cap: u64) -> Result<Self> {
        let count = idx.block_count().filter(|c| *c <= cap).ok_or_else(|| {
            Error::Resource(format!(
                "N_s^N = {}^{} block candidates exceed the materialization cap {cap}",
                idx.n_s, idx.n
            ))
        })?;
        let g = model.gram();
        let data = (0..count).map(|q| quad_form(g, &idx.data_block(q))).collect();
        let fills = idx.fill_count().expect("fill count fits when block count does");
        let swt = (0..idx.m)
            .map(|m| (0..fills).map(|q| quad_form(g, &idx.sw_block(q, m, sw))).collect())
            .collect();
        Ok(Self { data, sw: swt })
    }
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

fn check_len(r_p: &[Complex64], idx: &CandidateIndexing) -> Result<()> {
    if r_p.len() != idx.k * idx.m {
        return Err(Error::Structural(format!(
            "post-processed vector has {} samples, expected L_sw = {}",
            r_p.len(),
            idx.k * idx.m
        )));
    }
    Ok(())
}

/// Detector bundle for a known channel matrix: exact LRT, ALRT and RALRT.
#[derive(Debug, Clone)]
pub struct KnownChannel {
    model: BlockModel,
    tables: TraceTables,
    idx: CandidateIndexing,
    sw: SyncWord,
}

impl KnownChannel {
    pub fn new(b: CMatrix, c_inv: CMatrix, idx: CandidateIndexing, sw: SyncWord, cap: u64) -> Result<Self> {
        let model = BlockModel::new(b, c_inv)?;
        if model.k() != idx.k || model.n() != idx.n {
            return Err(Error::Structural("B does not match the candidate geometry".into()));
        }
        let tables = TraceTables::new(&model, &idx, &sw, cap)?;
        Ok(Self { model, tables, idx, sw })
    }

    pub fn model(&self) -> &BlockModel {
        &self.model
    }

    pub fn tables(&self) -> &TraceTables {
        &self.tables
    }

    fn block_terms(&self, r_p: &[Complex64], m: usize) -> LinearTerms {
        let k = self.idx.k;
        LinearTerms::new(&self.model.project(&r_p[m * k..(m + 1) * k]), self.idx.symbols())
    }

    /// Per-block objectives `a^H G a - 2 Re(y^H a)` over all data candidates
    /// and all sync fills.
    fn block_objectives(&self, r_p: &[Complex64], m: usize) -> (Vec<f64>, Vec<f64>) {
        let terms = self.block_terms(r_p, m);
        let data = terms
            .all(0, self.idx.n)
            .into_iter()
            .zip(&self.tables.data)
            .map(|(lin, quad)| quad - 2.0 * lin)
            .collect();
        let sw_digits: Vec<usize> = self.sw.block(self.idx.m - 1 - m, self.idx.k).to_vec();
        let sw_lin = terms.of_digits(0, sw_digits.into_iter());
        let sw = terms
            .all(self.idx.k, self.idx.l_ch)
            .into_iter()
            .zip(&self.tables.sw[m])
            .map(|(lin, quad)| quad - 2.0 * (sw_lin + lin))
            .collect();
        (data, sw)
    }

    /// Log of the data-over-sync density ratio.
    pub fn lrt(&self, r_p: &[Complex64]) -> Result<f64> {
        check_len(r_p, &self.idx)?;
        let mut value = 0.0;
        for m in 0..self.idx.m {
            let (data, sw) = self.block_objectives(r_p, m);
            value += log_sum_exp(data.iter().map(|v| -v)) - log_sum_exp(sw.iter().map(|v| -v));
        }
        Ok(value)
    }

    /// Max-log approximation scaled by `1 / N_s^{L_tot}`.
    pub fn alrt(&self, r_p: &[Complex64]) -> Result<f64> {
        check_len(r_p, &self.idx)?;
        let mut value = 0.0;
        for m in 0..self.idx.m {
            let (data, sw) = self.block_objectives(r_p, m);
            value += min(sw.iter().copied()) - min(data.iter().copied());
        }
        Ok(value / self.idx.data_count_f64())
    }

    /// ALRT restricted to the reduced grids.
    pub fn ralrt(&self, r_p: &[Complex64], grids: &GridSets) -> Result<f64> {
        check_len(r_p, &self.idx)?;
        reduced(r_p, &self.model, grids, &self.idx, &self.sw, |q| self.tables.data[q as usize], |m, q| {
            self.tables.sw[m][q as usize]
        })
    }
}

fn min(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(f64::INFINITY, f64::min)
}

fn reduced(
    r_p: &[Complex64],
    model: &BlockModel,
    grids: &GridSets,
    idx: &CandidateIndexing,
    sw: &SyncWord,
    data_quad: impl Fn(u64) -> f64,
    sw_quad: impl Fn(usize, u64) -> f64,
) -> Result<f64> {
    if grids.data.len() != idx.m || grids.sw.len() != idx.m {
        return Err(Error::Structural("grid sets do not match the block count".into()));
    }
    if grids.data.iter().chain(&grids.sw).any(|b| b.is_empty()) {
        return Err(Error::Structural("empty grid set".into()));
    }
    let k = idx.k;
    let mut value = 0.0;
    for m in 0..idx.m {
        let terms = LinearTerms::new(&model.project(&r_p[m * k..(m + 1) * k]), idx.symbols());
        let best_data = min(grids.data[m].iter().map(|q| {
            data_quad(*q) - 2.0 * terms.of_digits(0, idx.digits(*q, idx.n).into_iter())
        }));
        let sw_lin = terms.of_digits(0, sw.block(idx.m - 1 - m, k).iter().copied());
        let best_sw = min(grids.sw[m].iter().map(|q| {
            sw_quad(m, *q) - 2.0 * (sw_lin + terms.of_digits(k, idx.digits(*q, idx.l_ch).into_iter()))
        }));
        value += best_sw - best_data;
    }
    Ok(value / idx.data_count_f64())
}

/// Exact log density ratio for channel matrix `b`.
pub fn lrt_log_statistic(
    r_p: &[Complex64],
    b: &CMatrix,
    c_inv: &CMatrix,
    idx: &CandidateIndexing,
    sw: &SyncWord,
) -> Result<f64> {
    KnownChannel::new(b.clone(), c_inv.clone(), idx.clone(), sw.clone(), u64::MAX)?.lrt(r_p)
}

/// ALRT evaluated literally from materialized `D` matrices.
pub fn alrt_statistic(
    r_p: &[Complex64],
    b: &CMatrix,
    c_inv: &CMatrix,
    d: &DMatrices,
    idx: &CandidateIndexing,
    sw: &SyncWord,
) -> Result<f64> {
    check_len(r_p, idx)?;
    let model = BlockModel::new(b.clone(), c_inv.clone())?;
    let g = model.gram();
    let ys: Vec<Vec<Complex64>> = (0..idx.m)
        .map(|m| model.project(&r_p[m * idx.k..(m + 1) * idx.k]))
        .collect();
    let trace = |dm: &CMatrix| -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..idx.n {
            for j in 0..idx.n {
                acc += g[(i, j)] * dm[(j, i)];
            }
        }
        acc.re
    };
    let cross = |stack: &[Complex64]| -> f64 {
        ys.iter()
            .enumerate()
            .map(|(m, y)| {
                y.iter()
                    .zip(&stack[m * idx.n..(m + 1) * idx.n])
                    .map(|(yi, ai)| (yi.conj() * ai).re)
                    .sum::<f64>()
            })
            .sum()
    };
    let best_data = min(
        d.data
            .iter()
            .enumerate()
            .map(|(l, dm)| trace(dm) - 2.0 * cross(&idx.data_vector(l as u64))),
    );
    let best_sw = min(
        d.sw
            .iter()
            .enumerate()
            .map(|(u, dm)| trace(dm) - 2.0 * cross(&idx.sw_vector(u as u64, sw))),
    );
    Ok((best_sw - best_data) / idx.data_count_f64())
}

/// RALRT for channel matrix `b`.
pub fn ralrt_statistic(
    r_p: &[Complex64],
    b: &CMatrix,
    c_inv: &CMatrix,
    grids: &GridSets,
    idx: &CandidateIndexing,
    sw: &SyncWord,
) -> Result<f64> {
    salrt_statistic(r_p, b, c_inv, grids, idx, sw)
}

/// RALRT with an estimated channel matrix; quadratic terms are computed
/// only for the candidates in the grids.
pub fn salrt_statistic(
    r_p: &[Complex64],
    b_hat: &CMatrix,
    c_inv: &CMatrix,
    grids: &GridSets,
    idx: &CandidateIndexing,
    sw: &SyncWord,
) -> Result<f64> {
    check_len(r_p, idx)?;
    let model = BlockModel::new(b_hat.clone(), c_inv.clone())?;
    if model.k() != idx.k || model.n() != idx.n {
        return Err(Error::Structural("channel matrix does not match the candidate geometry".into()));
    }
    let g = model.gram().clone();
    reduced(
        r_p,
        &model,
        grids,
        idx,
        sw,
        |q| quad_form(&g, &idx.data_block(q)),
        |m, q| quad_form(&g, &idx.sw_block(q, m, sw)),
    )
}
