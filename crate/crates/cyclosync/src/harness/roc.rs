use serde::{Deserialize, Serialize};

use crate::detectors::Orientation;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    /// Threshold in statistic units; infinite at the `(0,0)` endpoint.
    pub threshold: f64,
    pub p_fa: f64,
    pub p_d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub n_h0: usize,
    pub n_h1: usize,
    pub orientation: Orientation,
}

/// Empirical ROC from a sweep through every distinct pooled statistic.
/// A window is declared `H1` when its statistic is on the `H1` side of the
/// threshold or equal to it.
pub fn empirical_roc(h0: &[f64], h1: &[f64], orientation: Orientation) -> Result<RocCurve> {
    if h0.is_empty() || h1.is_empty() {
        return Err(Error::invalid("roc", "both hypotheses need at least one statistic"));
    }
    if h0.iter().chain(h1).any(|v| !v.is_finite()) {
        return Err(Error::invalid("roc", "statistics must be finite"));
    }
    // score: larger means "more H1"
    let sign = match orientation {
        Orientation::LargeFavorsH1 => 1.0,
        Orientation::LargeFavorsH0 => -1.0,
    };
    let mut pooled: Vec<(f64, bool)> = h0
        .iter()
        .map(|v| (sign * v, false))
        .chain(h1.iter().map(|v| (sign * v, true)))
        .collect();
    pooled.sort_by(|a, b| b.0.total_cmp(&a.0));

    let (n0, n1) = (h0.len() as f64, h1.len() as f64);
    let mut points = vec![RocPoint {
        threshold: sign * f64::INFINITY,
        p_fa: 0.0,
        p_d: 0.0,
    }];
    let (mut fa, mut det) = (0usize, 0usize);
    let mut i = 0;
    while i < pooled.len() {
        let score = pooled[i].0;
        while i < pooled.len() && pooled[i].0 == score {
            if pooled[i].1 {
                det += 1;
            } else {
                fa += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            threshold: sign * score,
            p_fa: fa as f64 / n0,
            p_d: det as f64 / n1,
        });
    }
    Ok(RocCurve {
        points,
        n_h0: h0.len(),
        n_h1: h1.len(),
        orientation,
    })
}

/// Trapezoidal area under the curve.
pub fn auc(curve: &RocCurve) -> f64 {
    curve
        .points
        .windows(2)
        .map(|w| (w[1].p_fa - w[0].p_fa) * 0.5 * (w[1].p_d + w[0].p_d))
        .sum()
}
