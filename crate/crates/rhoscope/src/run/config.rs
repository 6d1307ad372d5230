//! Experiment configuration: a JSON file plus a few CLI overrides drives
//! every run.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::ShotConfig;
use crate::optics::{BeamSplitterParams, OpticsConfig, PPolicy};
use crate::recon::plan::AnglePair;
use crate::state::{random_density, DensityMatrix};

/// Which scheme a run exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Minimal,
    OperatorBasis,
    Optics,
}

/// Where the (true) input state comes from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    /// Ginibre-ensemble random state of the configured dimension.
    Ginibre { rank: usize, seed: u64 },
    /// Density-matrix JSON file (`{"dim", "re", "im"}`).
    File { path: PathBuf },
}

/// Shot-noise block of the config file. When absent the run is exact.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ShotsBlock {
    pub shots: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_efficiency")]
    pub efficiency: f64,
}

fn default_efficiency() -> f64 {
    1.0
}

/// Sweep block: repeated noisy reconstructions over shot levels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepBlock {
    pub levels: Vec<u64>,
    pub trials: usize,
    /// Also run the three-probe least-squares estimator on the same draws
    /// and emit paired MSE columns.
    #[serde(default)]
    pub compare_triple: bool,
    /// Phase angle of the redundant third probe.
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_mag_c")]
    pub mag_c: f64,
}

fn default_gamma() -> f64 {
    std::f64::consts::FRAC_PI_4
}

fn default_mag_c() -> f64 {
    1.0
}

/// The config file schema. Unknown fields are rejected so typos surface as
/// config errors instead of silently applied defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// Fock truncation for optics runs; defaults to `dim + 2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angles: Option<AnglePair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<ShotsBlock>,
    pub state: StateSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beam_splitter: Option<BeamSplitterParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_policy: Option<PPolicy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepBlock>,
}

/// Flags that override config values.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub exact: bool,
    pub check_probe_shift: bool,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| Error::ConfigInvalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.dim()?;
        if dim < 2 {
            return Err(Error::ConfigInvalid("dim must be >= 2".into()));
        }
        if let StateSpec::Ginibre { rank, .. } = &self.state {
            if *rank == 0 || *rank > dim {
                return Err(Error::InvalidRank { rank: *rank, dim });
            }
        }
        if let Some(shots) = &self.shots {
            if shots.shots == 0 {
                return Err(Error::ConfigInvalid("shots must be >= 1".into()));
            }
            if !(shots.efficiency > 0.0 && shots.efficiency <= 1.0) {
                return Err(Error::InvalidEfficiency(shots.efficiency));
            }
        }
        if let Some(sweep) = &self.sweep {
            if sweep.levels.len() < 2 {
                return Err(Error::ConfigInvalid(
                    "sweep needs at least 2 shot levels".into(),
                ));
            }
            if sweep.levels.contains(&0) {
                return Err(Error::ConfigInvalid("sweep levels must be >= 1".into()));
            }
            if sweep.trials == 0 {
                return Err(Error::ConfigInvalid("sweep needs at least 1 trial".into()));
            }
        }
        if self.mode == Mode::Optics {
            let cutoff = self.cutoff_value()?;
            if cutoff < dim - 1 {
                return Err(Error::CutoffTooSmall {
                    cutoff,
                    required: dim - 1,
                });
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> Result<usize> {
        match (self.dim, &self.state) {
            (Some(d), _) => Ok(d),
            (None, _) => Err(Error::ConfigInvalid("missing required field: dim".into())),
        }
    }

    pub fn cutoff_value(&self) -> Result<usize> {
        match self.cutoff {
            Some(c) => Ok(c),
            None => Ok(self.dim()? + 2),
        }
    }

    pub fn angles_value(&self) -> Result<AnglePair> {
        match &self.angles {
            Some(a) => AnglePair::new(a.alpha, a.beta, a.mag_a, a.mag_b),
            None => Ok(AnglePair::sensitivity_optimized()),
        }
    }

    pub fn optics_config(&self) -> Result<OpticsConfig> {
        let mut cfg = OpticsConfig::new(self.cutoff_value()?);
        if let Some(bs) = &self.beam_splitter {
            cfg.bs = BeamSplitterParams::new(bs.tau, bs.refl, bs.phi_tau, bs.phi_rho)?;
        }
        if let Some(p) = self.p_policy {
            cfg.p_policy = p;
        }
        Ok(cfg)
    }

    /// Applies CLI overrides: `--seed` beats the config seed, which beats
    /// `TOMO_SEED`, which beats the default of 0. `--exact` removes the
    /// shot block entirely.
    pub fn resolve(mut self, overrides: &Overrides) -> Result<Self> {
        if overrides.exact {
            self.shots = None;
        }
        if let Some(out) = &overrides.out {
            self.out_dir = Some(out.clone());
        }
        if let Some(block) = &mut self.shots {
            let env_seed = std::env::var("TOMO_SEED")
                .ok()
                .and_then(|s| s.parse::<u64>().ok());
            block.seed = overrides.seed.or(block.seed).or(env_seed).or(Some(0));
        }
        self.validate()?;
        Ok(self)
    }

    pub fn shot_config(&self) -> Result<Option<ShotConfig>> {
        match &self.shots {
            None => Ok(None),
            Some(block) => Ok(Some(ShotConfig::new(
                block.shots,
                block.seed.unwrap_or(0),
                block.efficiency,
            )?)),
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out_dir.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    /// Materializes the input state. Returns the state together with the
    /// Hermiticity correction applied when reading from file (0 for
    /// generated states).
    pub fn load_state(&self) -> Result<(DensityMatrix, f64)> {
        let dim = self.dim()?;
        match &self.state {
            StateSpec::Ginibre { rank, seed } => Ok((random_density(dim, *rank, *seed)?, 0.0)),
            StateSpec::File { path } => {
                let text = std::fs::read_to_string(path)?;
                let (rho, correction) = DensityMatrix::from_json_str(&text)?;
                if rho.dim() != dim {
                    return Err(Error::DimensionMismatch(rho.dim(), dim));
                }
                Ok((rho, correction))
            }
        }
    }
}
