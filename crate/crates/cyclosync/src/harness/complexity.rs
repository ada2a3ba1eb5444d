//! Closed-form multiplication (CM) and addition (CA) counts per detector.

use serde::{Deserialize, Serialize};

use crate::channel::FrameGeometry;
use crate::detectors::DetectorId;
use crate::estimation::EqualizerConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityRow {
    pub detector: DetectorId,
    pub cm: u128,
    pub ca: u128,
}

/// Evaluates the CM/CA formulas. `q0`, `q1` are the reduced grid sizes;
/// `c1`, `c2` are the constellation-dependent hard-decision constants.
pub fn complexity_report(
    geom: &FrameGeometry,
    q0: u128,
    q1: u128,
    eq: &EqualizerConfig,
    n_s: usize,
    c1: u128,
    c2: u128,
) -> Vec<ComplexityRow> {
    let (n, k, m) = (geom.n as u128, geom.k as u128, geom.m as u128);
    let (l_ch, l_tot, l_sw) = (geom.l_ch as u128, geom.l_tot as u128, geom.l_sw as u128);
    let ns = n_s as u128;
    let full = ns.pow(geom.l_tot as u32) + ns.pow((geom.m * geom.l_ch) as u32);
    let reduced = q0 + q1;
    let (p_h, j, omega, l_eq) = (eq.p_h as u128, eq.j as u128, eq.omega as u128, eq.l_eq as u128);

    let alrt_cm = m * k * (n + 1) + 1;
    let alrt_ca = m * ((n - 1) * k + (k - 1));

    let salrt_cm = (alrt_cm + n.pow(3)) * reduced
        + k * n * (k + n)
        + 1
        + p_h * (j - (l_ch + 1)) * (2 * (l_ch + 1) + 3)
        + p_h * (l_ch + 2) * ((omega + 1) * (l_ch + 1) + (l_ch + 1).pow(2))
        + (l_eq - p_h * l_ch) * (ns + l_ch + 1)
        + (c1 + c2) * l_tot;
    let salrt_ca = (alrt_ca + (n - 1) * n * n + n) * reduced
        + n * (k - 1) * (k + n)
        + 1
        + p_h * (j - (l_ch + 1)) * (2 * (l_ch + 1))
        + p_h * (omega * (l_ch + 1) * (l_ch + 2) + l_ch * (l_ch + 1) + l_ch.pow(3))
        + (l_eq - p_h * l_ch) * (ns + l_ch)
        + (c1 + c2) * (2 * l_tot - 1);

    vec![
        ComplexityRow {
            detector: DetectorId::Lrt,
            cm: m * k * (n + k + 1) * full + 1,
            ca: m * (k * n + (k - 1) * (k + 1)) * full,
        },
        ComplexityRow {
            detector: DetectorId::Alrt,
            cm: alrt_cm * full + 1,
            ca: alrt_ca * full + 1,
        },
        ComplexityRow {
            detector: DetectorId::Ralrt,
            cm: alrt_cm * reduced + 1,
            ca: alrt_ca * reduced + 1,
        },
        ComplexityRow {
            detector: DetectorId::Salrt,
            cm: salrt_cm,
            ca: salrt_ca,
        },
        ComplexityRow {
            detector: DetectorId::Correlator,
            cm: l_sw + 1,
            ca: l_sw - 1,
        },
    ]
}
