//! Expectation-value simulation and detector noise.
//!
//! Finite-shot statistics are per-projector independent binomial draws. The
//! RNG contract: one master seed, with each projector's stream selected by
//! its ordinal in the plan, so parallel and serial simulations produce
//! identical results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedIndex;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recon::plan::{ExpectationMap, ExpectationRecord, MeasurementPlan, ProjectorSpec};
use crate::state::DensityMatrix;
use crate::tol::{DIST_TAIL_TOL, INVERSION_AMPLIFICATION_BOUND};

/// Shot-noise configuration: repetitions per projector, master seed, and
/// detector quantum efficiency.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ShotConfig {
    pub shots: u64,
    pub seed: u64,
    pub efficiency: f64,
}

impl ShotConfig {
    pub fn new(shots: u64, seed: u64, efficiency: f64) -> Result<Self> {
        if shots == 0 {
            return Err(Error::InvalidShots);
        }
        if !(efficiency > 0.0 && efficiency <= 1.0) {
            return Err(Error::InvalidEfficiency(efficiency));
        }
        Ok(ShotConfig {
            shots,
            seed,
            efficiency,
        })
    }

    /// Ideal detector, shots and seed only.
    pub fn ideal(shots: u64, seed: u64) -> Result<Self> {
        ShotConfig::new(shots, seed, 1.0)
    }
}

/// RNG for the sub-stream `stream` of a master seed.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Estimates one projector expectation from `cfg.shots` binomial trials.
/// The draw uses the stream derived from `(cfg.seed, ordinal)`.
pub fn sample_expectation(
    rho: &DensityMatrix,
    spec: &ProjectorSpec,
    cfg: &ShotConfig,
    ordinal: u64,
) -> Result<ExpectationRecord> {
    let p = rho.expectation(&spec.realize(rho.dim())?)?;
    let mut rng = stream_rng(cfg.seed, ordinal);
    let hits = Binomial::new(cfg.shots, p)
        .map_err(|_| Error::ConfigInvalid(format!("binomial probability {p} invalid")))?
        .sample(&mut rng);
    Ok(ExpectationRecord {
        spec: *spec,
        estimate: hits as f64 / cfg.shots as f64,
        shots: Some(cfg.shots),
    })
}

/// Exact expectations for every spec in the plan.
pub fn simulate_plan_exact(rho: &DensityMatrix, plan: &MeasurementPlan) -> Result<ExpectationMap> {
    if rho.dim() != plan.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), plan.dim()));
    }
    let records = plan
        .specs()
        .iter()
        .map(|spec| {
            Ok(ExpectationRecord {
                spec: *spec,
                estimate: rho.expectation(&spec.realize(rho.dim())?)?,
                shots: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ExpectationMap::from_records(plan.dim(), records)
}

/// Finite-shot expectations for every spec in the plan. Sampling across
/// projectors is parallel; each projector owns the stream named by its plan
/// ordinal, so the result is independent of scheduling.
pub fn simulate_plan_shots(
    rho: &DensityMatrix,
    plan: &MeasurementPlan,
    cfg: &ShotConfig,
) -> Result<ExpectationMap> {
    if rho.dim() != plan.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), plan.dim()));
    }
    let records = plan
        .specs()
        .par_iter()
        .enumerate()
        .map(|(ordinal, spec)| sample_expectation(rho, spec, cfg, ordinal as u64))
        .collect::<Result<Vec<_>>>()?;
    ExpectationMap::from_records(plan.dim(), records)
}

/// Probabilities over photon counts `0..=cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonCountDistribution {
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct PhotonCountJson {
    cutoff: usize,
    probs: Vec<f64>,
}

impl PhotonCountDistribution {
    /// Strict constructor: entries >= -1e-12, total within `DIST_TAIL_TOL`
    /// of 1.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        PhotonCountDistribution::with_tail_tol(probs, DIST_TAIL_TOL)
    }

    /// Strict constructor with a caller-chosen normalization slack.
    pub fn with_tail_tol(probs: Vec<f64>, tail_tol: f64) -> Result<Self> {
        let d = PhotonCountDistribution::truncated(probs)?;
        let total = d.total();
        if (total - 1.0).abs() > tail_tol {
            return Err(Error::ConfigInvalid(format!(
                "photon distribution total {total} not within {tail_tol:.1e} of 1"
            )));
        }
        Ok(d)
    }

    /// Relaxed constructor for truncated outputs: finite entries >= -1e-12,
    /// no normalization requirement.
    pub fn truncated(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::ConfigInvalid(
                "photon distribution needs >= 1 entry".into(),
            ));
        }
        if probs.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("photon distribution"));
        }
        if let Some(&bad) = probs.iter().find(|&&p| p < -1e-12) {
            return Err(Error::ConfigInvalid(format!(
                "photon distribution entry {bad} below -1e-12"
            )));
        }
        Ok(PhotonCountDistribution { probs })
    }

    /// Photon-number distribution of a state: the density-matrix diagonal,
    /// zero-padded out to `cutoff`.
    pub fn from_state(rho: &DensityMatrix, cutoff: usize) -> Result<Self> {
        if rho.dim() > cutoff + 1 {
            return Err(Error::CutoffTooSmall {
                cutoff,
                required: rho.dim() - 1,
            });
        }
        let mut probs = rho.diagonal();
        probs.resize(cutoff + 1, 0.0);
        PhotonCountDistribution::truncated(probs)
    }

    pub fn cutoff(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Normalized histogram of `shots` draws, using the given sub-stream of
    /// the master seed.
    pub fn sample_histogram(&self, shots: u64, seed: u64, stream: u64) -> Result<Self> {
        if shots == 0 {
            return Err(Error::InvalidShots);
        }
        let weights: Vec<f64> = self.probs.iter().map(|&p| p.max(0.0)).collect();
        let index = WeightedIndex::new(&weights)
            .map_err(|_| Error::ConfigInvalid("cannot sample an all-zero distribution".into()))?;
        let mut rng = stream_rng(seed, stream);
        let mut counts = vec![0u64; self.probs.len()];
        for _ in 0..shots {
            counts[index.sample(&mut rng)] += 1;
        }
        PhotonCountDistribution::truncated(
            counts
                .into_iter()
                .map(|c| c as f64 / shots as f64)
                .collect(),
        )
    }

    /// Cleanup for inverted distributions: clips negative entries to zero
    /// and renormalizes.
    pub fn clip_renormalized(&self) -> Result<Self> {
        let clipped: Vec<f64> = self.probs.iter().map(|&p| p.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        if total <= 0.0 {
            return Err(Error::ZeroTrace);
        }
        PhotonCountDistribution::truncated(clipped.into_iter().map(|p| p / total).collect())
    }

    pub fn to_json_string(&self) -> String {
        let body = PhotonCountJson {
            cutoff: self.cutoff(),
            probs: self.probs.clone(),
        };
        serde_json::to_string_pretty(&body).expect("photon distribution serialization")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let body: PhotonCountJson = serde_json::from_str(s)?;
        if body.probs.len() != body.cutoff + 1 {
            return Err(Error::ConfigInvalid(
                "photon distribution probs length must be cutoff + 1".into(),
            ));
        }
        PhotonCountDistribution::truncated(body.probs)
    }
}

/// Binomial coefficient, exact in f64 for the desk-scale counts used here.
pub(crate) fn binomial_coeff(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Forward Bernoulli loss kernel on a raw probability vector:
/// `out[m] = sum_{n >= m} C(n, m) eta^m (1 - eta)^(n - m) in[n]`.
pub(crate) fn loss_kernel(input: &[f64], eta: f64) -> Vec<f64> {
    let len = input.len();
    let mut out = vec![0.0; len];
    for m in 0..len {
        let mut acc = 0.0;
        for n in m..len {
            acc += binomial_coeff(n, m)
                * eta.powi(m as i32)
                * (1.0 - eta).powi((n - m) as i32)
                * input[n];
        }
        out[m] = acc;
    }
    out
}

/// Back-substitution inverse of [`loss_kernel`] (the system is triangular:
/// counts only ever move downward).
pub(crate) fn inverse_kernel(input: &[f64], eta: f64) -> Vec<f64> {
    let len = input.len();
    let mut out = vec![0.0; len];
    for n in (0..len).rev() {
        let mut acc = input[n];
        for k in (n + 1)..len {
            acc -= binomial_coeff(k, n)
                * eta.powi(n as i32)
                * (1.0 - eta).powi((k - n) as i32)
                * out[k];
        }
        out[n] = acc / eta.powi(n as i32);
    }
    out
}

/// Degrades true photon statistics through a detector of quantum efficiency
/// `eta`: each photon is registered independently with probability `eta`.
pub fn bernoulli_loss(d: &PhotonCountDistribution, eta: f64) -> Result<PhotonCountDistribution> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidEfficiency(eta));
    }
    PhotonCountDistribution::truncated(loss_kernel(d.probs(), eta))
}

/// Outcome of the inverse Bernoulli transformation.
#[derive(Debug, Clone)]
pub struct InversionOutcome {
    pub dist: PhotonCountDistribution,
    /// Worst-case coefficient growth `(1/eta)^cutoff`.
    pub amplification: f64,
    /// Set when `eta <= 0.5`: the inversion is algebraically exact at finite
    /// cutoff but amplifies statistical noise beyond practical use.
    pub ill_conditioned: bool,
    /// Most negative entry of the inverted distribution (inversion of noisy
    /// data can undershoot zero; entries are reported, not clipped).
    pub min_entry: f64,
}

/// Recovers true photon statistics from efficiency-degraded ones by solving
/// the triangular loss system. Efficiencies at or below 50% are flagged as
/// ill-conditioned but still inverted; the hard error is reserved for
/// amplification beyond `INVERSION_AMPLIFICATION_BOUND`.
pub fn inverse_bernoulli(d: &PhotonCountDistribution, eta: f64) -> Result<InversionOutcome> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidEfficiency(eta));
    }
    let amplification = (1.0 / eta).powi(d.cutoff() as i32);
    if amplification > INVERSION_AMPLIFICATION_BOUND {
        return Err(Error::IllConditioned {
            amplification,
            bound: INVERSION_AMPLIFICATION_BOUND,
        });
    }
    let inverted = inverse_kernel(d.probs(), eta);
    let min_entry = inverted.iter().copied().fold(f64::INFINITY, f64::min);
    // Entries can be slightly (or under noise, substantially) negative;
    // bypass the -1e-12 floor and report instead.
    let dist = PhotonCountDistribution { probs: inverted };
    Ok(InversionOutcome {
        dist,
        amplification,
        ill_conditioned: eta <= 0.5,
        min_entry,
    })
}
