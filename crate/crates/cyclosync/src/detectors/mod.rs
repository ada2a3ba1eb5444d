//! Frame synchronization test statistics.

mod grids;
mod indexing;
mod stats;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::frame::Hypothesis;
use crate::Error;

pub use grids::{build_grid_sets, hard_decision, neighbourhood_size, GridSets, HardDecision};
pub use indexing::{build_d_matrices, CandidateIndexing, DMatrices, DEFAULT_MATERIALIZATION_CAP};
pub use stats::{
    alrt_statistic, lrt_log_statistic, ralrt_statistic, salrt_statistic, BlockModel, KnownChannel, TraceTables,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectorId {
    Lrt,
    Alrt,
    Ralrt,
    Salrt,
    Correlator,
}

impl DetectorId {
    pub const ALL: [DetectorId; 5] = [
        DetectorId::Lrt,
        DetectorId::Alrt,
        DetectorId::Ralrt,
        DetectorId::Salrt,
        DetectorId::Correlator,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DetectorId::Lrt => "lrt",
            DetectorId::Alrt => "alrt",
            DetectorId::Ralrt => "ralrt",
            DetectorId::Salrt => "salrt",
            DetectorId::Correlator => "correlator",
        }
    }

    pub fn orientation(self) -> Orientation {
        match self {
            DetectorId::Correlator => Orientation::LargeFavorsH1,
            _ => Orientation::LargeFavorsH0,
        }
    }
}

impl fmt::Display for DetectorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DetectorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        DetectorId::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::invalid("detector", format!("unknown detector '{s}'")))
    }
}

/// Which hypothesis large statistic values point to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    LargeFavorsH0,
    LargeFavorsH1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorStatistic {
    pub value: f64,
    pub orientation: Orientation,
    pub detector: DetectorId,
}

impl DetectorStatistic {
    pub fn new(detector: DetectorId, value: f64) -> Self {
        Self {
            value,
            orientation: detector.orientation(),
            detector,
        }
    }
}

/// Threshold decision. LRT family: `value > threshold` gives `H0`.
/// Correlator: `value >= threshold` gives `H1`. Ties resolve to `H1`.
pub fn decide(stat: &DetectorStatistic, threshold: f64) -> Hypothesis {
    match stat.orientation {
        Orientation::LargeFavorsH0 if stat.value > threshold => Hypothesis::H0,
        Orientation::LargeFavorsH0 => Hypothesis::H1,
        Orientation::LargeFavorsH1 if stat.value >= threshold => Hypothesis::H1,
        Orientation::LargeFavorsH1 => Hypothesis::H0,
    }
}

/// `|r^H f|^2` over the first `len(f)` raw samples.
pub fn correlator_statistic(r_raw: &[Complex64], reference: &[Complex64]) -> f64 {
    r_raw
        .iter()
        .zip(reference)
        .map(|(r, f)| r.conj() * f)
        .sum::<Complex64>()
        .norm_sqr()
}
