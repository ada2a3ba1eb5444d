//! Subcommand implementations.

use std::io::Write;
use std::path::{Path, PathBuf};

use cyclosync::detectors::{neighbourhood_size, DetectorId};
use cyclosync::estimation::estimate_channel;
use cyclosync::frame::{Hypothesis, Layout, SyncWord};
use cyclosync::harness::validate::validation_suite;
use cyclosync::harness::{
    auc, complexity_report, empirical_roc, sample_statistics, sw_search, Evaluator, SwCandidates,
};
use cyclosync::scenarios::Scenario;
use serde::Serialize;

use crate::config::{ScenarioConfig, SymbolValue};
use crate::error::CliError;

fn create(path: &Path) -> Result<std::fs::File, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(std::fs::File::create(path)?)
}

/// ROC curves for every (detector, SNR); returns `(detector, snr, auc)`.
pub fn roc(
    cfg: &ScenarioConfig,
    detectors: &[DetectorId],
    trials: usize,
    seed: u64,
    out: &Path,
) -> Result<Vec<(DetectorId, f64, f64)>, CliError> {
    let s = cfg.to_scenario()?;
    let mut w = csv::Writer::from_writer(create(out)?);
    w.write_record(["detector", "snr_db", "threshold", "p_fa", "p_d"])?;
    let mut summary = Vec::new();
    for &snr in &cfg.run.snr_db {
        let samples = sample_statistics(&s, detectors, snr, trials, seed)?;
        for st in samples {
            let curve = empirical_roc(&st.h0, &st.h1, st.detector.orientation())?;
            for p in &curve.points {
                w.write_record([
                    st.detector.name().to_string(),
                    snr.to_string(),
                    p.threshold.to_string(),
                    p.p_fa.to_string(),
                    p.p_d.to_string(),
                ])?;
            }
            summary.push((st.detector, snr, auc(&curve)));
        }
    }
    w.flush()?;
    Ok(summary)
}

#[derive(Serialize)]
struct SearchLine {
    sw: Vec<SymbolValue>,
    auc: f64,
    trials: usize,
    seed: u64,
}

fn sw_values(s: &Scenario, sw: &SyncWord) -> Vec<SymbolValue> {
    sw.symbols(&s.constellation)
        .into_iter()
        .map(|v| if v.im == 0.0 { SymbolValue::Real(v.re) } else { SymbolValue::Complex([v.re, v.im]) })
        .collect()
}

/// Histogram path next to the JSON-lines output.
pub fn histogram_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.hist.csv"))
}

/// Sync-word search; returns the best line as JSON.
pub fn search_sw(
    cfg: &ScenarioConfig,
    mode: &SwCandidates,
    detector: DetectorId,
    snr_db: f64,
    trials: usize,
    seed: u64,
    out: &Path,
) -> Result<String, CliError> {
    let s = cfg.to_scenario()?;
    let report = sw_search(&s, mode, trials, snr_db, seed, detector)?;
    let mut f = std::io::BufWriter::new(create(out)?);
    let mut best = String::new();
    for (i, r) in report.ranked.iter().enumerate() {
        let line = serde_json::to_string(&SearchLine {
            sw: sw_values(&s, &r.sw),
            auc: r.auc,
            trials: r.trials,
            seed: r.seed,
        })
        .expect("plain data");
        writeln!(f, "{line}")?;
        if i == 0 {
            best = line;
        }
    }
    f.flush()?;
    let mut h = csv::Writer::from_writer(create(&histogram_path(out))?);
    h.write_record(["lo", "hi", "count", "pdf", "cdf"])?;
    for b in &report.histogram.bins {
        h.write_record([b.lo.to_string(), b.hi.to_string(), b.count.to_string(), b.pdf.to_string(), b.cdf.to_string()])?;
    }
    h.flush()?;
    Ok(best)
}

/// Closed-form operation counts.
pub fn complexity(cfg: &ScenarioConfig, c1: u128, c2: u128, out: &Path) -> Result<(), CliError> {
    let s = cfg.to_scenario()?;
    let g = &s.geometry;
    let ns = s.constellation.len();
    let q0 = (neighbourhood_size(g.n, ns, s.detector.e_r0) as u128).pow(g.m as u32);
    let q1 = (neighbourhood_size(g.l_ch, ns, s.detector.e_r1) as u128).pow(g.m as u32);
    let mut w = csv::Writer::from_writer(create(out)?);
    w.write_record(["detector", "cm", "ca"])?;
    for r in complexity_report(g, q0, q1, &s.equalizer, ns, c1, c2) {
        w.write_record([r.detector.name().to_string(), r.cm.to_string(), r.ca.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Statistical model checks; `Validation` error when any check fails.
pub fn validate(cfg: &ScenarioConfig, trials: usize, seed: u64) -> Result<String, CliError> {
    let s = cfg.to_scenario()?;
    let report = validation_suite(&s, cfg.run.snr_db[0], trials, seed)?;
    let mut text = String::new();
    for c in &report.checks {
        text.push_str(&format!("{} {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
    }
    if report.passed() {
        Ok(text)
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        Err(CliError::Validation(format!("{text}failed checks: {}", failed.join(", "))))
    }
}

#[derive(Serialize)]
pub struct EstimateReport {
    pub snr_db: f64,
    /// `[phase][tap] = [re, im]`, estimate `i` belongs to time `L_EQ - i`.
    pub estimate: Vec<Vec<[f64; 2]>>,
    pub truth: Vec<Vec<[f64; 2]>>,
    pub nmse: f64,
}

/// One pass of the blind estimation chain on an `H0` window.
pub fn estimate(cfg: &ScenarioConfig, seed: u64) -> Result<EstimateReport, CliError> {
    let s = cfg.to_scenario()?;
    let snr = cfg.run.snr_db[0];
    let ev = Evaluator::new(&s, &[], snr)?;
    let w = ev.window(seed, 0, Hypothesis::H0, Layout::Interleaved)?;
    let est = estimate_channel(&w.trailing, &s.equalizer, &s.constellation, &s.geometry)?;
    let n = s.equalizer.l_eq as i64;
    let truth: Vec<Vec<_>> = (0..s.geometry.p_h)
        .map(|i| (0..=s.geometry.l_ch).map(|l| s.channel.tap(n - i as i64, l)).collect())
        .collect();
    let (mut num, mut den) = (0.0, 0.0);
    for (e, t) in est.taps.iter().zip(&truth) {
        for (a, b) in e.iter().zip(t) {
            num += (a - b).norm_sqr();
            den += b.norm_sqr();
        }
    }
    let pairs = |v: &Vec<Vec<num_complex::Complex64>>| v.iter().map(|r| r.iter().map(|c| [c.re, c.im]).collect()).collect();
    Ok(EstimateReport {
        snr_db: snr,
        estimate: pairs(&est.taps),
        truth: pairs(&truth),
        nmse: num / den,
    })
}
