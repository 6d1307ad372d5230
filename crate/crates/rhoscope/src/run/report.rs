//! Run reports and the tidy CSV emitters. No plotting here: every table is
//! written for external tooling.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::optics::{BandReport, ProbeShiftReport};
use crate::recon::plan::{ExpectationMap, ProjectorSpec};
use crate::recon::{ReconstructionReport, Scheme};
use crate::run::config::ExperimentConfig;
use crate::state::DensityMatrix;

/// Reconstruction-quality metrics against the known true state.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Metrics {
    pub fidelity: f64,
    pub trace_distance: f64,
    pub max_element_error: f64,
}

impl Metrics {
    pub fn compute(rho_hat: &DensityMatrix, truth: &DensityMatrix) -> Result<Self> {
        Ok(Metrics {
            fidelity: rho_hat.fidelity(truth)?,
            trace_distance: rho_hat.trace_distance(truth)?,
            max_element_error: (rho_hat.matrix() - truth.matrix())
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max),
        })
    }
}

/// Everything a run leaves behind, echoed into `report.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub scheme: Scheme,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<Metrics>,
    pub condition_summary: f64,
    /// Largest elementwise move of the physicality projection.
    pub max_physicality_residual: f64,
    /// Hermiticity correction applied when the input state came from file.
    pub hermitize_correction: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe_shift_max_discrepancy: Option<f64>,
    pub timing_ms: u128,
    pub version: String,
}

impl RunReport {
    pub fn new(
        config: &ExperimentConfig,
        recon: &ReconstructionReport,
        truth: Option<&DensityMatrix>,
        hermitize_correction: f64,
        timing_ms: u128,
    ) -> Result<Self> {
        let metrics = match truth {
            Some(t) => Some(Metrics::compute(&recon.rho_hat, t)?),
            None => None,
        };
        Ok(RunReport {
            config: config.clone(),
            scheme: recon.scheme,
            metrics,
            condition_summary: recon.condition_summary,
            max_physicality_residual: recon.max_residual(),
            hermitize_correction,
            probe_shift_max_discrepancy: None,
            timing_ms,
            version: env!("CARGO_PKG_VERSION").to_string(),
        })
    }
}

fn fmt_opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `expectations.csv`: one row per measured projector.
pub fn expectations_csv(data: &ExpectationMap, seed: Option<u64>) -> String {
    let mut out = String::from("spec_id,kind,n,m,a_re,a_im,estimate,shots,seed\n");
    for (i, rec) in data.records().iter().enumerate() {
        match &rec.spec {
            ProjectorSpec::Diagonal(n) => {
                let _ = writeln!(
                    out,
                    "{i},diag,{n},,,,{},{},{}",
                    rec.estimate,
                    fmt_opt(rec.shots),
                    fmt_opt(seed)
                );
            }
            ProjectorSpec::TwoState(s) => {
                let _ = writeln!(
                    out,
                    "{i},pair,{},{},{},{},{},{},{}",
                    s.n,
                    s.m,
                    s.a.re,
                    s.a.im,
                    rec.estimate,
                    fmt_opt(rec.shots),
                    fmt_opt(seed)
                );
            }
        }
    }
    out
}

/// `metrics.csv`: a single keyed row per run.
pub fn metrics_csv(
    scheme: Scheme,
    shots: Option<u64>,
    efficiency: Option<f64>,
    seed: Option<u64>,
    metrics: Option<&Metrics>,
    condition_summary: f64,
) -> String {
    let mut out =
        String::from("scheme,shots,efficiency,seed,fidelity,trace_distance,max_element_error,condition_summary\n");
    let _ = writeln!(
        out,
        "{scheme},{},{},{},{},{},{},{condition_summary}",
        fmt_opt(shots),
        fmt_opt(efficiency),
        fmt_opt(seed),
        fmt_opt(metrics.map(|m| m.fidelity)),
        fmt_opt(metrics.map(|m| m.trace_distance)),
        fmt_opt(metrics.map(|m| m.max_element_error)),
    );
    out
}

/// `element_errors.csv`: estimate vs truth, one row per matrix element.
pub fn element_errors_csv(rho_hat: &DensityMatrix, truth: Option<&DensityMatrix>) -> String {
    let mut out = String::from("row,col,est_re,est_im,true_re,true_im,abs_error\n");
    let dim = rho_hat.dim();
    for row in 0..dim {
        for col in 0..dim {
            let est = rho_hat.element(row, col);
            match truth {
                Some(t) => {
                    let tv = t.element(row, col);
                    let _ = writeln!(
                        out,
                        "{row},{col},{},{},{},{},{}",
                        est.re,
                        est.im,
                        tv.re,
                        tv.im,
                        (est - tv).norm()
                    );
                }
                None => {
                    let _ = writeln!(out, "{row},{col},{},{},,,", est.re, est.im);
                }
            }
        }
    }
    out
}

/// `bands.csv`: per-band element discrepancies of an optics run.
pub fn bands_csv(bands: &[BandReport], truth: Option<&DensityMatrix>) -> String {
    let mut out = String::from("band_offset,row,col,est_re,est_im,true_re,true_im,abs_error\n");
    for band in bands {
        for el in &band.elements {
            match truth {
                Some(t) => {
                    let tv = t.element(el.row, el.col);
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{},{}",
                        band.offset,
                        el.row,
                        el.col,
                        el.value.re,
                        el.value.im,
                        tv.re,
                        tv.im,
                        (el.value - tv).norm()
                    );
                }
                None => {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},,,",
                        band.offset, el.row, el.col, el.value.re, el.value.im
                    );
                }
            }
        }
    }
    out
}

/// `p_redundancy.csv`: how many photon counts contributed to each element
/// and how far the single-count estimates spread.
pub fn p_redundancy_csv(bands: &[BandReport]) -> String {
    let mut out = String::from("band_offset,row,col,usable_p,p_spread\n");
    for band in bands {
        for el in &band.elements {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                band.offset, el.row, el.col, el.usable_p, el.p_spread
            );
        }
    }
    out
}

/// `probe_shift.csv`: reconstructed band elements per probe shift.
pub fn probe_shift_csv(report: &ProbeShiftReport) -> String {
    let mut out = String::from("shift,band_offset,row,col,est_re,est_im\n");
    for (t, band) in report.offsets.iter().zip(&report.bands) {
        for el in band {
            let _ = writeln!(
                out,
                "{t},{},{},{},{},{}",
                report.band_offset, el.row, el.col, el.value.re, el.value.im
            );
        }
    }
    out
}

/// One aggregated sweep row.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub level: u64,
    pub trials: usize,
    pub mean_trace_distance: f64,
    /// Sample standard deviation; `None` for a single trial.
    pub std_trace_distance: Option<f64>,
    pub mse_rj_pair: Option<f64>,
    pub mse_rj_triple: Option<f64>,
}

/// `sweep.csv`: error vs shot level, with optional paired estimator MSE
/// columns.
pub fn sweep_csv(rows: &[SweepRow], compare_triple: bool) -> String {
    let mut out = String::from("level,trials,mean_trace_distance,std_trace_distance");
    if compare_triple {
        out.push_str(",mse_rj_pair,mse_rj_triple");
    }
    out.push('\n');
    for row in rows {
        let _ = write!(
            out,
            "{},{},{},{}",
            row.level,
            row.trials,
            row.mean_trace_distance,
            fmt_opt(row.std_trace_distance)
        );
        if compare_triple {
            let _ = write!(
                out,
                ",{},{}",
                fmt_opt(row.mse_rj_pair),
                fmt_opt(row.mse_rj_triple)
            );
        }
        out.push('\n');
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}
