//! The quantum-optical measurement channel.
//!
//! A probe field prepared in a two-Fock-state superposition enters one port
//! of a lossless beam splitter, the signal field (the unknown state) enters
//! the other, and both outputs are photon-counted. The joint photocount
//! distribution then carries, total by total, the same information as the
//! superposition-projector expectations of the abstract schemes: one probe
//! pair recovers a whole diagonal band of the density matrix.

pub mod amplitude;
pub mod band;
pub mod joint;

pub use amplitude::{bs_amplitude, AmplitudeTable};
pub use band::{
    extract_m, optics_tomography, probe_shift_equivalence_check, reconstruct_band, BandElement,
    BandReport, OpticsNoise, OpticsReport, ProbeShiftReport,
};
pub use joint::joint_distribution;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{inverse_kernel, loss_kernel, stream_rng};
use crate::state::{PureState, SuperpositionSpec};
use crate::tol::{AMPLITUDE_TOL, INVERSION_AMPLIFICATION_BOUND, STRUCTURAL_TOL};

/// Lossless beam splitter: transmittance, reflectance, and the two phases
/// imprinted on transmission and reflection.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BeamSplitterParams {
    pub tau: f64,
    pub refl: f64,
    pub phi_tau: f64,
    pub phi_rho: f64,
}

impl BeamSplitterParams {
    pub fn new(tau: f64, refl: f64, phi_tau: f64, phi_rho: f64) -> Result<Self> {
        if ![tau, refl, phi_tau, phi_rho].iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("beam splitter parameters"));
        }
        if tau < 0.0 || refl < 0.0 || (tau + refl - 1.0).abs() > STRUCTURAL_TOL {
            return Err(Error::ConfigInvalid(format!(
                "beam splitter must be lossless: tau = {tau}, refl = {refl}"
            )));
        }
        Ok(BeamSplitterParams {
            tau,
            refl,
            phi_tau,
            phi_rho,
        })
    }

    /// 50:50 with zero phases.
    pub fn balanced() -> Self {
        BeamSplitterParams {
            tau: 0.5,
            refl: 0.5,
            phi_tau: 0.0,
            phi_rho: 0.0,
        }
    }
}

impl Default for BeamSplitterParams {
    fn default() -> Self {
        BeamSplitterParams::balanced()
    }
}

/// Probe field `N_a (|n> + a |m>)` with `n > m`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProbeSpec {
    pub n: usize,
    pub m: usize,
    pub a: Complex64,
}

impl ProbeSpec {
    pub fn new(n: usize, m: usize, a: Complex64) -> Result<Self> {
        if n <= m {
            return Err(Error::ConfigInvalid(format!(
                "probe spec requires n > m, got ({n}, {m})"
            )));
        }
        if a.norm_sqr() == 0.0 {
            return Err(Error::ZeroCoefficient);
        }
        if !a.re.is_finite() || !a.im.is_finite() {
            return Err(Error::NonFinite("probe coefficient"));
        }
        Ok(ProbeSpec { n, m, a })
    }

    /// `N_a = 1/sqrt(1 + |a|^2)`.
    pub fn normalization(&self) -> f64 {
        1.0 / (1.0 + self.a.norm_sqr()).sqrt()
    }

    /// Band offset `n - m` this probe addresses.
    pub fn offset(&self) -> usize {
        self.n - self.m
    }

    /// Realizes the probe as a state over Fock indices `0..=cutoff`.
    pub fn state(&self, cutoff: usize) -> Result<PureState> {
        let spec = SuperpositionSpec::new(self.n, self.m, self.a)?;
        PureState::superposition(&spec, cutoff + 1)
    }

    /// File-naming label, e.g. `a_n3m1`.
    pub fn label(&self, role: char) -> String {
        format!("{role}_n{}m{}", self.n, self.m)
    }
}

/// Which photon counts to combine when several `p` values address the same
/// matrix element.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PPolicy {
    /// Use only the best-conditioned count (largest amplitude product).
    Single,
    /// Combine all usable counts, weighted by the squared amplitude product
    /// (proportional to inverse variance under shot noise).
    #[default]
    Average,
}

/// Configuration of the optical channel.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OpticsConfig {
    /// Largest Fock index per mode; the joint grid covers totals up to
    /// `2 * cutoff`.
    pub cutoff: usize,
    pub bs: BeamSplitterParams,
    pub p_policy: PPolicy,
    /// Floor on |A_p(M,m) A_p(N,n)| below which a count is unusable.
    pub amp_tol: f64,
}

impl OpticsConfig {
    pub fn new(cutoff: usize) -> Self {
        OpticsConfig {
            cutoff,
            bs: BeamSplitterParams::balanced(),
            p_policy: PPolicy::Average,
            amp_tol: AMPLITUDE_TOL,
        }
    }
}

/// Joint photocount probabilities `P(p, q)` over the two detectors, on the
/// grid `0 <= p, q <= 2 * cutoff` (entries with `p + q > 2 * cutoff` are
/// identically zero).
#[derive(Debug, Clone, PartialEq)]
pub struct JointPhotonDistribution {
    cutoff: usize,
    side: usize,
    grid: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct JointEntryJson {
    p: usize,
    q: usize,
    prob: f64,
}

#[derive(Serialize, Deserialize)]
struct JointJson {
    cutoff: usize,
    entries: Vec<JointEntryJson>,
}

impl JointPhotonDistribution {
    pub(crate) fn zeros(cutoff: usize) -> Self {
        let side = 2 * cutoff + 1;
        JointPhotonDistribution {
            cutoff,
            side,
            grid: vec![0.0; side * side],
        }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn prob(&self, p: usize, q: usize) -> f64 {
        if p >= self.side || q >= self.side {
            0.0
        } else {
            self.grid[p * self.side + q]
        }
    }

    pub(crate) fn set(&mut self, p: usize, q: usize, value: f64) {
        self.grid[p * self.side + q] = value;
    }

    pub fn total(&self) -> f64 {
        self.grid.iter().sum()
    }

    /// Marginal distribution of detector I.
    pub fn marginal_p(&self) -> Vec<f64> {
        (0..self.side)
            .map(|p| (0..self.side).map(|q| self.prob(p, q)).sum())
            .collect()
    }

    /// Independent Bernoulli loss of efficiency `eta` at both detectors.
    pub fn detector_loss(&self, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidEfficiency(eta));
        }
        let mut out = self.clone();
        out.transform_axes(|v| loss_kernel(v, eta));
        Ok(out)
    }

    /// Inverse Bernoulli transformation at both detectors.
    pub fn detector_inverse(&self, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidEfficiency(eta));
        }
        let amplification = (1.0 / eta).powi(2 * self.cutoff as i32);
        if amplification > INVERSION_AMPLIFICATION_BOUND {
            return Err(Error::IllConditioned {
                amplification,
                bound: INVERSION_AMPLIFICATION_BOUND,
            });
        }
        let mut out = self.clone();
        out.transform_axes(|v| inverse_kernel(v, eta));
        Ok(out)
    }

    fn transform_axes(&mut self, kernel: impl Fn(&[f64]) -> Vec<f64>) {
        let side = self.side;
        // p axis (q fixed)
        for q in 0..side {
            let col: Vec<f64> = (0..side).map(|p| self.prob(p, q)).collect();
            for (p, v) in kernel(&col).into_iter().enumerate() {
                self.set(p, q, v);
            }
        }
        // q axis (p fixed)
        for p in 0..side {
            let row: Vec<f64> = (0..side).map(|q| self.prob(p, q)).collect();
            for (q, v) in kernel(&row).into_iter().enumerate() {
                self.set(p, q, v);
            }
        }
    }

    /// Normalized histogram of `shots` draws from the joint distribution.
    pub fn sample_histogram(&self, shots: u64, seed: u64, stream: u64) -> Result<Self> {
        if shots == 0 {
            return Err(Error::InvalidShots);
        }
        let weights: Vec<f64> = self.grid.iter().map(|&w| w.max(0.0)).collect();
        let index = rand_distr::weighted::WeightedIndex::new(&weights)
            .map_err(|_| Error::ConfigInvalid("cannot sample an all-zero distribution".into()))?;
        let mut rng = stream_rng(seed, stream);
        let mut counts = vec![0u64; self.grid.len()];
        for _ in 0..shots {
            counts[rand_distr::Distribution::sample(&index, &mut rng)] += 1;
        }
        let mut out = JointPhotonDistribution::zeros(self.cutoff);
        for (i, c) in counts.into_iter().enumerate() {
            out.grid[i] = c as f64 / shots as f64;
        }
        Ok(out)
    }

    pub fn to_json_string(&self) -> String {
        let mut entries = Vec::new();
        for p in 0..self.side {
            for q in 0..self.side {
                let prob = self.prob(p, q);
                if prob != 0.0 {
                    entries.push(JointEntryJson { p, q, prob });
                }
            }
        }
        serde_json::to_string_pretty(&JointJson {
            cutoff: self.cutoff,
            entries,
        })
        .expect("joint distribution serialization")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let body: JointJson = serde_json::from_str(s)?;
        let mut out = JointPhotonDistribution::zeros(body.cutoff);
        for e in body.entries {
            if e.p >= out.side || e.q >= out.side {
                return Err(Error::IndexOutOfRange {
                    index: e.p.max(e.q),
                    dim: out.side,
                });
            }
            if !e.prob.is_finite() {
                return Err(Error::NonFinite("joint distribution entry"));
            }
            out.set(e.p, e.q, e.prob);
        }
        Ok(out)
    }
}
