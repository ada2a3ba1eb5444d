//! Hard decisions and reduced candidate grids.

use num_complex::Complex64;

use super::indexing::CandidateIndexing;
use crate::{Error, Result};

/// Coordinatewise nearest-symbol decisions on the raw window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardDecision {
    /// Per block, the `N` decided symbol indices under the data hypothesis.
    pub data: Vec<Vec<usize>>,
    /// Per block, the `L_ch` decided fill indices under the sync hypothesis.
    pub sw_fill: Vec<Vec<usize>>,
}

/// Hard decision on the raw (not post-processed) window. Sync-word positions
/// are fixed by the hypothesis, so only fill positions are decided for it.
/// Ties go to the lowest symbol index.
pub fn hard_decision(r_raw: &[Complex64], idx: &CandidateIndexing) -> Result<HardDecision> {
    if r_raw.len() < idx.l_tot {
        return Err(Error::Structural(format!(
            "hard decision needs {} samples, got {}",
            idx.l_tot,
            r_raw.len()
        )));
    }
    let nearest = |x: Complex64| {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, s) in idx.symbols().iter().enumerate() {
            let d = (x - s).norm_sqr();
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        best
    };
    let data: Vec<Vec<usize>> = (0..idx.m)
        .map(|m| r_raw[m * idx.n..(m + 1) * idx.n].iter().map(|x| nearest(*x)).collect())
        .collect();
    let sw_fill = data.iter().map(|b| b[idx.k..].to_vec()).collect();
    Ok(HardDecision { data, sw_fill })
}

/// `sum_{l<=e} C(len,l) (N_s-1)^l`: size of a Hamming ball.
pub fn neighbourhood_size(len: usize, n_s: usize, e: usize) -> u64 {
    let mut total = 0u64;
    let mut binom = 1u64;
    for l in 0..=e.min(len) {
        total += binom * (n_s as u64 - 1).pow(l as u32);
        binom = binom * (len - l) as u64 / (l as u64 + 1);
    }
    total
}

/// Per-block candidate indices within the Hamming radius of the hard decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSets {
    pub e_r0: usize,
    pub e_r1: usize,
    /// Block indices `q` allowed for each data block.
    pub data: Vec<Vec<u64>>,
    /// Fill indices `q~` allowed for each sync block.
    pub sw: Vec<Vec<u64>>,
}

impl GridSets {
    /// `|Q_0|`.
    pub fn data_cardinality(&self) -> u128 {
        self.data.iter().map(|b| b.len() as u128).product()
    }

    /// `|Q_1|`.
    pub fn sw_cardinality(&self) -> u128 {
        self.sw.iter().map(|b| b.len() as u128).product()
    }

    /// Joint indices `l` of `L_0`.
    pub fn data_joint_indices(&self, idx: &CandidateIndexing) -> Vec<u64> {
        joint(&self.data, idx.block_count().expect("block count fits u64"))
    }

    /// Joint indices `u` of `L_1`.
    pub fn sw_joint_indices(&self, idx: &CandidateIndexing) -> Vec<u64> {
        joint(&self.sw, idx.fill_count().expect("fill count fits u64"))
    }
}

fn joint(blocks: &[Vec<u64>], radix: u64) -> Vec<u64> {
    let mut out = vec![0u64];
    let mut weight = 1u64;
    for b in blocks {
        out = out
            .iter()
            .flat_map(|acc| b.iter().map(move |q| acc + q * weight))
            .collect();
        weight = weight.saturating_mul(radix);
    }
    out
}

/// Every digit vector within Hamming distance `e` of `base`.
fn hamming_ball(base: &[usize], n_s: usize, e: usize, idx: &CandidateIndexing) -> Vec<u64> {
    fn rec(
        pos: usize,
        left: usize,
        cur: &mut Vec<usize>,
        base: &[usize],
        n_s: usize,
        idx: &CandidateIndexing,
        out: &mut Vec<u64>,
    ) {
        if pos == base.len() {
            out.push(idx.index_of_digits(cur));
            return;
        }
        rec(pos + 1, left, cur, base, n_s, idx, out);
        if left > 0 {
            for s in (0..n_s).filter(|s| *s != base[pos]) {
                cur[pos] = s;
                rec(pos + 1, left - 1, cur, base, n_s, idx, out);
            }
            cur[pos] = base[pos];
        }
    }
    let mut out = Vec::with_capacity(neighbourhood_size(base.len(), n_s, e) as usize);
    let mut cur = base.to_vec();
    rec(0, e, &mut cur, base, n_s, idx, &mut out);
    out
}

/// Builds the reduced grids by substituting up to `e` coordinates of each
/// hard-decision block.
pub fn build_grid_sets(hd: &HardDecision, idx: &CandidateIndexing, e_r0: usize, e_r1: usize) -> Result<GridSets> {
    if e_r0 > idx.n {
        return Err(Error::invalid("e_r0", format!("must be at most N = {}", idx.n)));
    }
    if e_r1 > idx.l_ch {
        return Err(Error::invalid("e_r1", format!("must be at most L_ch = {}", idx.l_ch)));
    }
    let data = hd.data.iter().map(|b| hamming_ball(b, idx.n_s, e_r0, idx)).collect();
    let sw = hd.sw_fill.iter().map(|b| hamming_ball(b, idx.n_s, e_r1, idx)).collect();
    Ok(GridSets { e_r0, e_r1, data, sw })
}
