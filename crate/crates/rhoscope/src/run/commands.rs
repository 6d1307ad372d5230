//! The five batch commands behind the CLI: plan, simulate, reconstruct,
//! optics, sweep. Each consumes a validated config and leaves its artifacts
//! in the output directory.

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measure::{simulate_plan_exact, simulate_plan_shots, ShotConfig};
use crate::optics::{optics_tomography, probe_shift_equivalence_check, OpticsNoise};
use crate::recon::plan::{ExpectationMap, MeasurementPlan};
use crate::recon::{reconstruct_minimal, reconstruct_operator_basis, reconstruct_triple};
use crate::run::config::{ExperimentConfig, Mode};
use crate::run::report::{
    bands_csv, element_errors_csv, expectations_csv, metrics_csv, p_redundancy_csv,
    probe_shift_csv, sweep_csv, write_text, Metrics, RunReport, SweepRow,
};
use crate::state::DensityMatrix;

fn plan_for(cfg: &ExperimentConfig) -> Result<MeasurementPlan> {
    let dim = cfg.dim()?;
    match cfg.mode {
        Mode::Minimal => MeasurementPlan::minimal(dim, &cfg.angles_value()?),
        Mode::OperatorBasis => MeasurementPlan::operator_basis(dim),
        Mode::Optics => Err(Error::ConfigInvalid(
            "optics mode measures photocount distributions, not a projector plan; use the optics command".into(),
        )),
    }
}

/// Writes the measurement plan JSON; returns the plan and its path.
pub fn cmd_plan(cfg: &ExperimentConfig) -> Result<(MeasurementPlan, PathBuf)> {
    let plan = plan_for(cfg)?;
    let path = cfg.out_dir().join("plan.json");
    write_text(&path, &serde_json::to_string_pretty(&plan)?)?;
    Ok((plan, path))
}

/// Simulates expectation values (exact, or binomial per the shot block) and
/// writes `expectations.json` plus the flat CSV.
pub fn cmd_simulate(cfg: &ExperimentConfig) -> Result<(ExpectationMap, PathBuf)> {
    let plan = plan_for(cfg)?;
    let (rho, _) = cfg.load_state()?;
    if rho.dim() != plan.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), plan.dim()));
    }
    let shot_cfg = cfg.shot_config()?;
    let data = match &shot_cfg {
        None => simulate_plan_exact(&rho, &plan)?,
        Some(sc) => simulate_plan_shots(&rho, &plan, sc)?,
    };
    let dir = cfg.out_dir();
    write_text(
        &dir.join("plan.json"),
        &serde_json::to_string_pretty(&plan)?,
    )?;
    let path = dir.join("expectations.json");
    write_text(&path, &data.to_json_string())?;
    write_text(
        &dir.join("expectations.csv"),
        &expectations_csv(&data, shot_cfg.map(|s| s.seed)),
    )?;
    Ok((data, path))
}

/// Reads `expectations.json` back and reconstructs with the configured
/// scheme; writes the estimate, the run report, and the plotting tables.
pub fn cmd_reconstruct(cfg: &ExperimentConfig) -> Result<RunReport> {
    let start = Instant::now();
    let dir = cfg.out_dir();
    let text = std::fs::read_to_string(dir.join("expectations.json"))?;
    let data = ExpectationMap::from_json_str(&text)?;
    let plan = plan_for(cfg)?;
    let recon = match cfg.mode {
        Mode::Minimal => reconstruct_minimal(&plan, &data)?,
        Mode::OperatorBasis => reconstruct_operator_basis(&plan, &data)?,
        Mode::Optics => unreachable!("plan_for rejects optics mode"),
    };
    let (truth, hermitize_correction) = cfg.load_state()?;

    let mut report = RunReport::new(cfg, &recon, Some(&truth), hermitize_correction, 0)?;
    report.timing_ms = start.elapsed().as_millis();
    let shot_cfg = cfg.shot_config()?;
    write_text(&dir.join("rho_hat.json"), &recon.rho_hat.to_json_string())?;
    write_text(&dir.join("rho_true.json"), &truth.to_json_string())?;
    write_text(
        &dir.join("report.json"),
        &serde_json::to_string_pretty(&report)?,
    )?;
    write_text(
        &dir.join("metrics.csv"),
        &metrics_csv(
            recon.scheme,
            shot_cfg.map(|s| s.shots),
            shot_cfg.map(|s| s.efficiency),
            shot_cfg.map(|s| s.seed),
            report.metrics.as_ref(),
            recon.condition_summary,
        ),
    )?;
    write_text(
        &dir.join("element_errors.csv"),
        &element_errors_csv(&recon.rho_hat, Some(&truth)),
    )?;
    Ok(report)
}

/// End-to-end optical tomography; optionally also runs the probe-shift
/// equivalence check on exact data.
pub fn cmd_optics(cfg: &ExperimentConfig, check_probe_shift: bool) -> Result<RunReport> {
    let start = Instant::now();
    if cfg.mode != Mode::Optics {
        return Err(Error::ConfigInvalid(
            "optics command requires mode = \"optics\"".into(),
        ));
    }
    let (rho, hermitize_correction) = cfg.load_state()?;
    let optics_cfg = cfg.optics_config()?;
    let shot_cfg = cfg.shot_config()?;
    let noise = match &shot_cfg {
        None => OpticsNoise::Exact,
        Some(sc) => OpticsNoise::Shots(*sc),
    };
    let outcome = optics_tomography(&rho, &optics_cfg, &noise)?;

    let dir = cfg.out_dir();
    let mut report = RunReport::new(cfg, &outcome.recon, Some(&rho), hermitize_correction, 0)?;
    write_text(
        &dir.join("rho_hat.json"),
        &outcome.recon.rho_hat.to_json_string(),
    )?;
    write_text(&dir.join("rho_true.json"), &rho.to_json_string())?;
    write_text(
        &dir.join("bands.csv"),
        &bands_csv(&outcome.bands, Some(&rho)),
    )?;
    write_text(
        &dir.join("p_redundancy.csv"),
        &p_redundancy_csv(&outcome.bands),
    )?;
    write_text(
        &dir.join("metrics.csv"),
        &metrics_csv(
            outcome.recon.scheme,
            shot_cfg.map(|s| s.shots),
            shot_cfg.map(|s| s.efficiency),
            shot_cfg.map(|s| s.seed),
            report.metrics.as_ref(),
            outcome.recon.condition_summary,
        ),
    )?;
    write_text(
        &dir.join("element_errors.csv"),
        &element_errors_csv(&outcome.recon.rho_hat, Some(&rho)),
    )?;
    if check_probe_shift {
        let max_shift = (optics_cfg.cutoff - 1).min(2);
        let shifts: Vec<usize> = (0..=max_shift).collect();
        let shift_report = probe_shift_equivalence_check(&rho, 1, &shifts, &optics_cfg)?;
        write_text(
            &dir.join("probe_shift.csv"),
            &probe_shift_csv(&shift_report),
        )?;
        report.probe_shift_max_discrepancy = Some(shift_report.max_discrepancy);
    }
    report.timing_ms = start.elapsed().as_millis();
    write_text(
        &dir.join("report.json"),
        &serde_json::to_string_pretty(&report)?,
    )?;
    Ok(report)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable per-trial seed: independent of scheduling, collision-free across
/// (level, trial) pairs.
fn trial_seed(master: u64, level_idx: usize, trial: usize) -> u64 {
    splitmix64(master ^ splitmix64(((level_idx as u64) << 32) | trial as u64))
}

/// Squared (R, J) estimation error summed over subspace pairs, from the raw
/// (pre-projection) reconstruction.
fn rj_mse(raw: &nalgebra::DMatrix<num_complex::Complex64>, truth: &DensityMatrix) -> f64 {
    let dim = truth.dim();
    let mut acc = 0.0;
    let mut count = 0usize;
    for n in 0..dim {
        for m in (n + 1)..dim {
            acc += (raw[(n, m)] - truth.element(n, m)).norm_sqr();
            count += 1;
        }
    }
    acc / count as f64
}

/// Repeated noisy reconstructions across shot levels; emits mean and
/// standard deviation of the trace distance per level, plus paired
/// two-probe/three-probe MSE columns when `compare_triple` is set.
pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<(Vec<SweepRow>, PathBuf)> {
    let sweep = cfg
        .sweep
        .clone()
        .ok_or_else(|| Error::ConfigInvalid("sweep command needs a sweep block".into()))?;
    if cfg.mode != Mode::Minimal {
        return Err(Error::ConfigInvalid(
            "sweep supports mode = \"minimal\"".into(),
        ));
    }
    let dim = cfg.dim()?;
    let angles = cfg.angles_value()?;
    let (rho, _) = cfg.load_state()?;
    let master = cfg.shot_config()?.map(|s| s.seed).unwrap_or(0);
    let efficiency = cfg.shots.as_ref().map(|s| s.efficiency).unwrap_or(1.0);

    let pair_plan = MeasurementPlan::minimal(dim, &angles)?;
    let triple_plan = if sweep.compare_triple {
        Some(MeasurementPlan::redundant_triple(
            dim,
            &angles,
            sweep.gamma,
            sweep.mag_c,
        )?)
    } else {
        None
    };

    let mut rows = Vec::with_capacity(sweep.levels.len());
    for (level_idx, &level) in sweep.levels.iter().enumerate() {
        // Trials are independent; output order is fixed by the collect.
        let trial_results: Vec<(f64, f64, f64)> = (0..sweep.trials)
            .into_par_iter()
            .map(|trial| -> Result<(f64, f64, f64)> {
                let sc = ShotConfig::new(level, trial_seed(master, level_idx, trial), efficiency)?;
                match &triple_plan {
                    None => {
                        let data = simulate_plan_shots(&rho, &pair_plan, &sc)?;
                        let recon = reconstruct_minimal(&pair_plan, &data)?;
                        let td = recon.rho_hat.trace_distance(&rho)?;
                        Ok((td, rj_mse(&recon.raw, &rho), 0.0))
                    }
                    Some(tp) => {
                        // One simulation feeds both estimators so the
                        // comparison is paired draw for draw.
                        let data = simulate_plan_shots(&rho, tp, &sc)?;
                        let pair_data = data.subset(&pair_plan)?;
                        let pair_recon = reconstruct_minimal(&pair_plan, &pair_data)?;
                        let triple_recon = reconstruct_triple(tp, &data)?;
                        let td = pair_recon.rho_hat.trace_distance(&rho)?;
                        Ok((
                            td,
                            rj_mse(&pair_recon.raw, &rho),
                            rj_mse(&triple_recon.raw, &rho),
                        ))
                    }
                }
            })
            .collect::<Result<Vec<_>>>()?;

        let n = trial_results.len() as f64;
        let mean = trial_results.iter().map(|r| r.0).sum::<f64>() / n;
        let std = if trial_results.len() > 1 {
            let var = trial_results
                .iter()
                .map(|r| (r.0 - mean).powi(2))
                .sum::<f64>()
                / (n - 1.0);
            Some(var.sqrt())
        } else {
            None
        };
        let mse_pair = trial_results.iter().map(|r| r.1).sum::<f64>() / n;
        let mse_triple = trial_results.iter().map(|r| r.2).sum::<f64>() / n;
        rows.push(SweepRow {
            level,
            trials: sweep.trials,
            mean_trace_distance: mean,
            std_trace_distance: std,
            mse_rj_pair: sweep.compare_triple.then_some(mse_pair),
            mse_rj_triple: sweep.compare_triple.then_some(mse_triple),
        });
    }

    let path = cfg.out_dir().join("sweep.csv");
    write_text(&path, &sweep_csv(&rows, sweep.compare_triple))?;
    Ok((rows, path))
}

/// Recomputes the stored metrics from the stored matrices (consistency
/// check used by tests and available to callers).
pub fn recompute_metrics(dir: &std::path::Path) -> Result<Metrics> {
    let hat = std::fs::read_to_string(dir.join("rho_hat.json"))?;
    let truth = std::fs::read_to_string(dir.join("rho_true.json"))?;
    let (hat, _) = DensityMatrix::from_json_str(&hat)?;
    let (truth, _) = DensityMatrix::from_json_str(&truth)?;
    Metrics::compute(&hat, &truth)
}
