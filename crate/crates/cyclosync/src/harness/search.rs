//! Sync-word search by AUC.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{auc, empirical_roc, sample_statistics};
use crate::detectors::DetectorId;
use crate::frame::SyncWord;
use crate::scenarios::Scenario;
use crate::{Error, Result};

/// Stream used to pick sync words in sample mode.
const SAMPLE_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq)]
pub enum SwCandidates {
    List(Vec<SyncWord>),
    /// All `N_s^{L_sw}` words.
    Exhaustive,
    /// `n` distinct words drawn uniformly without replacement.
    Sample(usize),
}

impl std::str::FromStr for SwCandidates {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "exhaustive" {
            return Ok(SwCandidates::Exhaustive);
        }
        if let Some(n) = s.strip_prefix("sample:") {
            let n: usize = n
                .parse()
                .map_err(|_| Error::invalid("mode", format!("bad sample count in '{s}'")))?;
            return Ok(SwCandidates::Sample(n));
        }
        Err(Error::invalid("mode", format!("expected 'exhaustive' or 'sample:<n>', got '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AucResult {
    pub sw: SyncWord,
    pub auc: f64,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    /// Density: fraction per unit AUC.
    pub pdf: f64,
    /// Fraction of results with AUC below `hi`.
    pub cdf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AucHistogram {
    pub bins: Vec<HistogramBin>,
}

impl AucHistogram {
    /// Uniform bins over the observed range.
    pub fn new(values: &[f64], n_bins: usize) -> Self {
        if values.is_empty() || n_bins == 0 {
            return Self { bins: Vec::new() };
        }
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if hi <= lo {
            hi = lo + 1e-9;
        }
        let width = (hi - lo) / n_bins as f64;
        let mut counts = vec![0usize; n_bins];
        for v in values {
            let b = (((v - lo) / width) as usize).min(n_bins - 1);
            counts[b] += 1;
        }
        let total = values.len() as f64;
        let mut cum = 0usize;
        let bins = counts
            .iter()
            .enumerate()
            .map(|(i, c)| {
                cum += c;
                HistogramBin {
                    lo: lo + i as f64 * width,
                    hi: lo + (i + 1) as f64 * width,
                    count: *c,
                    pdf: *c as f64 / (total * width),
                    cdf: cum as f64 / total,
                }
            })
            .collect();
        Self { bins }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    /// Sorted by decreasing AUC.
    pub ranked: Vec<AucResult>,
    pub histogram: AucHistogram,
}

impl SearchReport {
    pub fn best(&self) -> &AucResult {
        &self.ranked[0]
    }

    /// Zero-based rank of `sw`, if it was evaluated.
    pub fn rank_of(&self, sw: &SyncWord) -> Option<usize> {
        self.ranked.iter().position(|r| &r.sw == sw)
    }
}

fn candidate_words(scenario: &Scenario, candidates: &SwCandidates, seed: u64) -> Result<Vec<SyncWord>> {
    let c = &scenario.constellation;
    let l_sw = scenario.geometry.l_sw;
    let total = (c.len() as u64)
        .checked_pow(l_sw as u32)
        .ok_or_else(|| Error::Resource("sync-word space does not fit in 64 bits".into()))?;
    match candidates {
        SwCandidates::List(v) => Ok(v.clone()),
        SwCandidates::Exhaustive => (0..total).map(|i| SyncWord::from_enumeration(c, l_sw, i)).collect(),
        SwCandidates::Sample(n) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(SAMPLE_STREAM);
            let n = (*n as u64).min(total) as usize;
            let mut picked = rand::seq::index::sample(&mut rng, total as usize, n).into_vec();
            picked.sort_unstable();
            picked
                .into_iter()
                .map(|i| SyncWord::from_enumeration(c, l_sw, i as u64))
                .collect()
        }
    }
}

/// Ranks candidate sync words by the AUC of `detector` at `snr_db`. Every
/// candidate sees the same random streams.
pub fn sw_search(
    scenario: &Scenario,
    candidates: &SwCandidates,
    trials_per_sw: usize,
    snr_db: f64,
    seed: u64,
    detector: DetectorId,
) -> Result<SearchReport> {
    let words = candidate_words(scenario, candidates, seed)?;
    if words.is_empty() {
        return Err(Error::invalid("sw_candidates", "need at least one candidate"));
    }
    let mut ranked = Vec::with_capacity(words.len());
    for sw in words {
        let sc = scenario.with_sync_word(sw.clone());
        let samples = sample_statistics(&sc, &[detector], snr_db, trials_per_sw, seed)?;
        let curve = empirical_roc(&samples[0].h0, &samples[0].h1, detector.orientation())?;
        ranked.push(AucResult {
            sw,
            auc: auc(&curve),
            trials: trials_per_sw,
            seed,
        });
    }
    let ns = scenario.constellation.len();
    ranked.sort_by(|a, b| {
        b.auc
            .total_cmp(&a.auc)
            .then(a.sw.enumeration_index(ns).cmp(&b.sw.enumeration_index(ns)))
    });
    let values: Vec<f64> = ranked.iter().map(|r| r.auc).collect();
    Ok(SearchReport {
        histogram: AucHistogram::new(&values, 50),
        ranked,
    })
}
