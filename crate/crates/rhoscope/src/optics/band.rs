//! Band-by-band recovery of the density matrix from joint photocount
//! distributions.
//!
//! For a probe `N_a (|n> + a|m>)` and a fixed count `p` at detector I, the
//! joint probability at total photon number `N + n` isolates the four
//! elements of `rho` on indices `{N, M}`, `M = N + n - m`. Subtracting the
//! known diagonal part leaves
//!
//! ```text
//! M(N, p) = 2 Re{ a rho_MN A_p(M,m) A*_p(N,n) }
//! ```
//!
//! which is the m-value machinery of the abstract scheme with the known
//! phase of the amplitude product added to the probe phase. Two probes with
//! phases differing by a non-multiple of pi then recover `rho_MN` for the
//! whole band `M - N = n - m`, one element per total photon number, and
//! every usable `p` gives an independent determination of the same element.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measure::{bernoulli_loss, inverse_bernoulli, PhotonCountDistribution, ShotConfig};
use crate::optics::amplitude::{bs_amplitude, AmplitudeTable};
use crate::optics::joint::joint_distribution;
use crate::optics::{
    BeamSplitterParams, JointPhotonDistribution, OpticsConfig, PPolicy, ProbeSpec,
};
use crate::recon::minimal::solve_pair_angles;
use crate::recon::{assemble_report, ReconstructionReport, Scheme};
use crate::state::DensityMatrix;
use crate::tol::{AMPLITUDE_TOL, ANGLE_COND_TOL};

/// Subtracts the known diagonal contribution from the joint probability at
/// `(p, N + n - p)` and rescales, returning
/// `M(N, p) = 2 Re{a rho_MN A_p(M,m) A*_p(N,n)}`.
pub fn extract_m(
    dist: &JointPhotonDistribution,
    probe: &ProbeSpec,
    big_n: usize,
    p: usize,
    bs: &BeamSplitterParams,
    diag: &[f64],
) -> Result<f64> {
    let total = big_n + probe.n;
    if p > total {
        return Err(Error::IndexOutOfRange {
            index: p,
            dim: total + 1,
        });
    }
    let big_m = big_n + probe.offset();
    if big_m >= diag.len() {
        return Err(Error::IndexOutOfRange {
            index: big_m,
            dim: diag.len(),
        });
    }
    let amp_n = bs_amplitude(p, big_n, probe.n, bs)?;
    let amp_m = bs_amplitude(p, big_m, probe.m, bs)?;
    if (amp_m * amp_n).norm() < AMPLITUDE_TOL {
        return Err(Error::VanishingAmplitude {
            row: big_m,
            col: big_n,
        });
    }
    let na2 = probe.normalization().powi(2);
    let diagonal_part = na2
        * (amp_n.norm_sqr() * diag[big_n] + probe.a.norm_sqr() * amp_m.norm_sqr() * diag[big_m]);
    Ok((dist.prob(p, total - p) - diagonal_part) / na2)
}

/// One recovered band element `rho[row, col]` with its count redundancy
/// diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct BandElement {
    pub row: usize,
    pub col: usize,
    pub value: Complex64,
    /// How many photon counts `p` contributed.
    pub usable_p: usize,
    /// Largest distance of a single-count estimate from the combined one.
    pub p_spread: f64,
}

fn m_value_at(
    dist: &JointPhotonDistribution,
    probe: &ProbeSpec,
    big_n: usize,
    big_m: usize,
    p: usize,
    product_norm: f64,
    amp_n_sq: f64,
    amp_m_sq: f64,
    diag: &[f64],
) -> f64 {
    let total = big_n + probe.n;
    let na2 = probe.normalization().powi(2);
    let mag = probe.a.norm();
    let diagonal_part = na2 * (amp_n_sq * diag[big_n] + mag * mag * amp_m_sq * diag[big_m]);
    (dist.prob(p, total - p) - diagonal_part) / (na2 * 2.0 * mag * product_norm)
}

/// Recovers the whole diagonal band `rho[k + (n-m), k]` from the joint
/// distributions of two probes sharing `(n, m)`. Per `cfg.p_policy`, each
/// element uses either the best-conditioned photon count or a weighted
/// combination of all usable ones.
pub fn reconstruct_band(
    dist_a: &JointPhotonDistribution,
    dist_b: &JointPhotonDistribution,
    probe_a: &ProbeSpec,
    probe_b: &ProbeSpec,
    bs: &BeamSplitterParams,
    diag: &[f64],
    cfg: &OpticsConfig,
) -> Result<Vec<BandElement>> {
    if (probe_a.n, probe_a.m) != (probe_b.n, probe_b.m) {
        return Err(Error::ConfigInvalid(format!(
            "probe pair must share (n, m): got ({}, {}) and ({}, {})",
            probe_a.n, probe_a.m, probe_b.n, probe_b.m
        )));
    }
    let alpha = probe_a.a.arg();
    let beta = probe_b.a.arg();
    let sine = (beta - alpha).sin().abs();
    if sine < ANGLE_COND_TOL {
        return Err(Error::DegenerateAngles {
            sine,
            tol: ANGLE_COND_TOL,
        });
    }

    let offset = probe_a.offset();
    let dim = diag.len();
    if dim <= offset {
        return Ok(Vec::new());
    }
    let max_total = (dim - 1 - offset) + probe_a.n;
    let grid_reach = 2 * dist_a.cutoff().min(dist_b.cutoff());
    if max_total > grid_reach {
        return Err(Error::CutoffTooSmall {
            cutoff: grid_reach / 2,
            required: max_total.div_ceil(2),
        });
    }
    let table = AmplitudeTable::new(bs, max_total)?;

    let mut elements = Vec::with_capacity(dim - offset);
    for big_n in 0..(dim - offset) {
        let big_m = big_n + offset;
        let total = big_n + probe_a.n;
        let mut estimates: Vec<(f64, f64, f64)> = Vec::new(); // (weight, R, J)
        for p in 0..=total {
            let amp_n = table.get(p, big_n, probe_a.n);
            let amp_m = table.get(p, big_m, probe_a.m);
            let product = amp_m * amp_n.conj();
            if product.norm() < cfg.amp_tol {
                continue;
            }
            let shift = product.arg();
            let m_a = m_value_at(
                dist_a,
                probe_a,
                big_n,
                big_m,
                p,
                product.norm(),
                amp_n.norm_sqr(),
                amp_m.norm_sqr(),
                diag,
            );
            let m_b = m_value_at(
                dist_b,
                probe_b,
                big_n,
                big_m,
                p,
                product.norm(),
                amp_n.norm_sqr(),
                amp_m.norm_sqr(),
                diag,
            );
            let (r, j) = solve_pair_angles(m_a, m_b, alpha + shift, beta + shift)?;
            estimates.push((product.norm_sqr(), r, j));
        }
        if estimates.is_empty() {
            return Err(Error::VanishingAmplitude {
                row: big_m,
                col: big_n,
            });
        }
        let (r, j) = match cfg.p_policy {
            PPolicy::Single => {
                let best = estimates
                    .iter()
                    .max_by(|a, b| a.0.total_cmp(&b.0))
                    .expect("nonempty estimates");
                (best.1, best.2)
            }
            PPolicy::Average => {
                let wsum: f64 = estimates.iter().map(|e| e.0).sum();
                (
                    estimates.iter().map(|e| e.0 * e.1).sum::<f64>() / wsum,
                    estimates.iter().map(|e| e.0 * e.2).sum::<f64>() / wsum,
                )
            }
        };
        let p_spread = estimates
            .iter()
            .map(|e| ((e.1 - r).powi(2) + (e.2 - j).powi(2)).sqrt())
            .fold(0.0, f64::max);
        elements.push(BandElement {
            row: big_m,
            col: big_n,
            value: Complex64::new(r, j),
            usable_p: estimates.len(),
            p_spread,
        });
    }
    Ok(elements)
}

/// Noise model of the optical pipeline.
#[derive(Debug, Clone, Copy)]
pub enum OpticsNoise {
    /// Use the exact distributions.
    Exact,
    /// Degrade by detector efficiency and invert, without sampling.
    LossOnly { efficiency: f64 },
    /// Degrade by efficiency, sample finite histograms, then invert.
    Shots(ShotConfig),
}

/// Diagnostics for one reconstructed band.
#[derive(Debug, Clone)]
pub struct BandReport {
    pub offset: usize,
    pub probe_a: ProbeSpec,
    pub probe_b: ProbeSpec,
    pub elements: Vec<BandElement>,
}

/// Full result of an optics run.
#[derive(Debug, Clone)]
pub struct OpticsReport {
    pub recon: ReconstructionReport,
    pub bands: Vec<BandReport>,
    /// Diagonal estimates used for the band extraction (renormalized).
    pub diagonal: Vec<f64>,
}

fn process_counts(
    dist: PhotonCountDistribution,
    noise: &OpticsNoise,
    stream: u64,
) -> Result<PhotonCountDistribution> {
    match noise {
        OpticsNoise::Exact => Ok(dist),
        OpticsNoise::LossOnly { efficiency } => {
            let lossy = bernoulli_loss(&dist, *efficiency)?;
            Ok(inverse_bernoulli(&lossy, *efficiency)?.dist)
        }
        OpticsNoise::Shots(cfg) => {
            let lossy = bernoulli_loss(&dist, cfg.efficiency)?;
            let sampled = lossy.sample_histogram(cfg.shots, cfg.seed, stream)?;
            Ok(inverse_bernoulli(&sampled, cfg.efficiency)?.dist)
        }
    }
}

fn process_joint(
    dist: JointPhotonDistribution,
    noise: &OpticsNoise,
    stream: u64,
) -> Result<JointPhotonDistribution> {
    match noise {
        OpticsNoise::Exact => Ok(dist),
        OpticsNoise::LossOnly { efficiency } => dist
            .detector_loss(*efficiency)?
            .detector_inverse(*efficiency),
        OpticsNoise::Shots(cfg) => dist
            .detector_loss(cfg.efficiency)?
            .sample_histogram(cfg.shots, cfg.seed, stream)?
            .detector_inverse(cfg.efficiency),
    }
}

/// Default probe pair for band offset `d`: `a = 1` and `b = i` on Fock
/// indices `(d, 0)`.
pub fn default_probe_pair(offset: usize) -> Result<(ProbeSpec, ProbeSpec)> {
    Ok((
        ProbeSpec::new(offset, 0, Complex64::new(1.0, 0.0))?,
        ProbeSpec::new(offset, 0, Complex64::new(0.0, 1.0))?,
    ))
}

/// End-to-end optical tomography of `rho_true`.
///
/// Diagonals come from the photocount distribution of the signal alone
/// (stream 0); band `d` uses the probe pair `(a = 1, b = i)` on `(d, 0)`
/// (streams `2d - 1` and `2d`). The assembled Hermitian estimate is
/// projected onto the physical set.
pub fn optics_tomography(
    rho_true: &DensityMatrix,
    cfg: &OpticsConfig,
    noise: &OpticsNoise,
) -> Result<OpticsReport> {
    let dim = rho_true.dim();
    if dim - 1 > cfg.cutoff {
        return Err(Error::CutoffTooSmall {
            cutoff: cfg.cutoff,
            required: dim - 1,
        });
    }

    let counts = process_counts(
        PhotonCountDistribution::from_state(rho_true, cfg.cutoff)?,
        noise,
        0,
    )?;
    let mut diag: Vec<f64> = counts.probs()[..dim].to_vec();
    let total: f64 = diag.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroTrace);
    }
    diag.iter_mut().for_each(|d| *d /= total);

    // Bands are independent given the shared inputs; distinct RNG streams
    // keep the parallel run identical to the serial one.
    let bands = (1..dim)
        .into_par_iter()
        .map(|offset| -> Result<BandReport> {
            let (probe_a, probe_b) = default_probe_pair(offset)?;
            let dist_a = process_joint(
                joint_distribution(rho_true, &probe_a.state(cfg.cutoff)?, cfg)?,
                noise,
                2 * offset as u64 - 1,
            )?;
            let dist_b = process_joint(
                joint_distribution(rho_true, &probe_b.state(cfg.cutoff)?, cfg)?,
                noise,
                2 * offset as u64,
            )?;
            let elements =
                reconstruct_band(&dist_a, &dist_b, &probe_a, &probe_b, &cfg.bs, &diag, cfg)?;
            Ok(BandReport {
                offset,
                probe_a,
                probe_b,
                elements,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut raw = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex64::new(diag[i], 0.0)
        } else {
            Complex64::default()
        }
    });
    for band in &bands {
        for el in &band.elements {
            raw[(el.row, el.col)] = el.value;
            raw[(el.col, el.row)] = el.value.conj();
        }
    }
    let recon = assemble_report(raw, Scheme::Optics, 1.0)?;
    Ok(OpticsReport {
        recon,
        bands,
        diagonal: diag,
    })
}

/// Result of the probe-shift equivalence check.
#[derive(Debug, Clone)]
pub struct ProbeShiftReport {
    pub band_offset: usize,
    pub offsets: Vec<usize>,
    /// Band elements per tested offset, in `offsets` order.
    pub bands: Vec<Vec<BandElement>>,
    /// Largest elementwise discrepancy between any two offsets.
    pub max_discrepancy: f64,
}

/// Probes `(t + d, t)` address the same band `d` for every shift `t`; on
/// exact data all shifts must reconstruct identical elements.
pub fn probe_shift_equivalence_check(
    rho: &DensityMatrix,
    band_offset: usize,
    shifts: &[usize],
    cfg: &OpticsConfig,
) -> Result<ProbeShiftReport> {
    if band_offset == 0 || band_offset >= rho.dim() {
        return Err(Error::ConfigInvalid(format!(
            "band offset {band_offset} outside 1..{}",
            rho.dim()
        )));
    }
    let mut diag = rho.diagonal();
    let total: f64 = diag.iter().sum();
    diag.iter_mut().for_each(|d| *d /= total);

    let mut bands = Vec::with_capacity(shifts.len());
    for &t in shifts {
        let n = t + band_offset;
        if n > cfg.cutoff {
            return Err(Error::CutoffTooSmall {
                cutoff: cfg.cutoff,
                required: n,
            });
        }
        let probe_a = ProbeSpec::new(n, t, Complex64::new(1.0, 0.0))?;
        let probe_b = ProbeSpec::new(n, t, Complex64::new(0.0, 1.0))?;
        let dist_a = joint_distribution(rho, &probe_a.state(cfg.cutoff)?, cfg)?;
        let dist_b = joint_distribution(rho, &probe_b.state(cfg.cutoff)?, cfg)?;
        bands.push(reconstruct_band(
            &dist_a, &dist_b, &probe_a, &probe_b, &cfg.bs, &diag, cfg,
        )?);
    }

    let mut max_discrepancy = 0.0_f64;
    for i in 0..bands.len() {
        for k in (i + 1)..bands.len() {
            for (a, b) in bands[i].iter().zip(&bands[k]) {
                max_discrepancy = max_discrepancy.max((a.value - b.value).norm());
            }
        }
    }
    Ok(ProbeShiftReport {
        band_offset,
        offsets: shifts.to_vec(),
        bands,
        max_discrepancy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{random_density, PureState};
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn extract_m_diagonal_state_vanishes() {
        let rho = DensityMatrix::from_populations(&[0.4, 0.35, 0.25]).unwrap();
        let cfg = OpticsConfig::new(5);
        let probe = ProbeSpec::new(1, 0, c(1.0, 0.0)).unwrap();
        let dist = joint_distribution(&rho, &probe.state(5).unwrap(), &cfg).unwrap();
        let diag = rho.diagonal();
        for big_n in 0..2 {
            for p in 0..=(big_n + 1) {
                match extract_m(&dist, &probe, big_n, p, &cfg.bs, &diag) {
                    Ok(m) => assert_abs_diff_eq!(m, 0.0, epsilon = 1e-12),
                    Err(Error::VanishingAmplitude { .. }) => {}
                    Err(e) => panic!("unexpected error {e}"),
                }
            }
        }
    }

    #[test]
    fn extract_m_matches_direct_cross_term() {
        // Signal (|0> + |1>)/sqrt(2), probe on (1, 0) with a = 1.
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let rho = DensityMatrix::pure(
            &PureState::new(DVector::from_vec(vec![c(r, 0.0), c(r, 0.0)])).unwrap(),
        );
        let cfg = OpticsConfig::new(4);
        let probe = ProbeSpec::new(1, 0, c(1.0, 0.0)).unwrap();
        let dist = joint_distribution(&rho, &probe.state(4).unwrap(), &cfg).unwrap();
        let diag = rho.diagonal();
        // bigN = 0 -> M = 1, total = 1.
        for p in 0..=1 {
            let amp_n = bs_amplitude(p, 0, 1, &cfg.bs).unwrap();
            let amp_m = bs_amplitude(p, 1, 0, &cfg.bs).unwrap();
            let expected = 2.0 * (probe.a * rho.element(1, 0) * amp_m * amp_n.conj()).re;
            let got = extract_m(&dist, &probe, 0, p, &cfg.bs, &diag).unwrap();
            assert_abs_diff_eq!(got, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn extract_m_vanishing_amplitude() {
        // Balanced splitter, probe (1, 0), element (1, 1)... p = 1 of the
        // (1,1) pair has A_1(1,1) = 0 (the bunching null).
        let rho = random_density(3, 3, 2).unwrap();
        let cfg = OpticsConfig::new(5);
        let probe = ProbeSpec::new(1, 0, c(1.0, 0.0)).unwrap();
        let dist = joint_distribution(&rho, &probe.state(5).unwrap(), &cfg).unwrap();
        let diag = rho.diagonal();
        // bigN = 1: total = 2, M = 2: A_1(1,1) = 0 kills the product.
        assert!(matches!(
            extract_m(&dist, &probe, 1, 1, &cfg.bs, &diag),
            Err(Error::VanishingAmplitude { .. })
        ));
        // p beyond the total photon number is rejected.
        assert!(matches!(
            extract_m(&dist, &probe, 1, 3, &cfg.bs, &diag),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn band_round_trip_exact() {
        let rho = random_density(6, 6, 21).unwrap();
        let cfg = OpticsConfig::new(8);
        let (probe_a, probe_b) = default_probe_pair(1).unwrap();
        let dist_a = joint_distribution(&rho, &probe_a.state(8).unwrap(), &cfg).unwrap();
        let dist_b = joint_distribution(&rho, &probe_b.state(8).unwrap(), &cfg).unwrap();
        let elements = reconstruct_band(
            &dist_a,
            &dist_b,
            &probe_a,
            &probe_b,
            &cfg.bs,
            &rho.diagonal(),
            &cfg,
        )
        .unwrap();
        assert_eq!(elements.len(), 5);
        for el in &elements {
            let truth = rho.element(el.row, el.col);
            assert!(
                (el.value - truth).norm() < 1e-8,
                "element ({},{}) err {}",
                el.row,
                el.col,
                (el.value - truth).norm()
            );
        }
    }

    #[test]
    fn band_exact_for_asymmetric_splitter_and_unequal_probe_magnitudes() {
        // Nothing in the extraction relies on a balanced splitter, zero
        // phases, or unit probe coefficients; the amplitude-product phase
        // folds into the effective angles and the magnitudes divide out.
        let rho = random_density(5, 5, 83).unwrap();
        let mut cfg = OpticsConfig::new(9);
        cfg.bs = BeamSplitterParams::new(0.37, 0.63, 1.2, -0.8).unwrap();
        let diag = rho.diagonal();
        for offset in 1..5usize {
            let probe_a = ProbeSpec::new(offset, 0, c(1.7, 0.0)).unwrap();
            let probe_b = ProbeSpec::new(offset, 0, c(0.0, 0.6)).unwrap();
            let dist_a = joint_distribution(&rho, &probe_a.state(9).unwrap(), &cfg).unwrap();
            let dist_b = joint_distribution(&rho, &probe_b.state(9).unwrap(), &cfg).unwrap();
            let elements =
                reconstruct_band(&dist_a, &dist_b, &probe_a, &probe_b, &cfg.bs, &diag, &cfg)
                    .unwrap();
            for el in &elements {
                let err = (el.value - rho.element(el.row, el.col)).norm();
                assert!(
                    err < 1e-10,
                    "offset {offset}, ({},{}): err {err}",
                    el.row,
                    el.col
                );
            }
        }
    }

    #[test]
    fn band_exactness_up_to_dim_eight() {
        let rho = random_density(8, 8, 88).unwrap();
        let cfg = OpticsConfig::new(12);
        let diag = rho.diagonal();
        for offset in 1..8usize {
            let (probe_a, probe_b) = default_probe_pair(offset).unwrap();
            let dist_a = joint_distribution(&rho, &probe_a.state(12).unwrap(), &cfg).unwrap();
            let dist_b = joint_distribution(&rho, &probe_b.state(12).unwrap(), &cfg).unwrap();
            let elements =
                reconstruct_band(&dist_a, &dist_b, &probe_a, &probe_b, &cfg.bs, &diag, &cfg)
                    .unwrap();
            assert_eq!(elements.len(), 8 - offset);
            for el in &elements {
                let err = (el.value - rho.element(el.row, el.col)).norm();
                assert!(
                    err < 1e-8,
                    "offset {offset}, ({},{}): err {err}",
                    el.row,
                    el.col
                );
            }
        }
    }

    #[test]
    fn band_p_policy_single_matches_average_on_exact_data() {
        let rho = random_density(5, 5, 33).unwrap();
        let mut cfg = OpticsConfig::new(8);
        let (probe_a, probe_b) = default_probe_pair(2).unwrap();
        let dist_a = joint_distribution(&rho, &probe_a.state(8).unwrap(), &cfg).unwrap();
        let dist_b = joint_distribution(&rho, &probe_b.state(8).unwrap(), &cfg).unwrap();
        let diag = rho.diagonal();
        cfg.p_policy = PPolicy::Average;
        let avg =
            reconstruct_band(&dist_a, &dist_b, &probe_a, &probe_b, &cfg.bs, &diag, &cfg).unwrap();
        cfg.p_policy = PPolicy::Single;
        let single =
            reconstruct_band(&dist_a, &dist_b, &probe_a, &probe_b, &cfg.bs, &diag, &cfg).unwrap();
        for (a, s) in avg.iter().zip(&single) {
            assert!((a.value - s.value).norm() < 1e-9);
            assert!(a.p_spread < 1e-9);
        }
    }

    #[test]
    fn tomography_exact_round_trip() {
        let rho = random_density(5, 5, 9).unwrap();
        let cfg = OpticsConfig::new(8);
        let report = optics_tomography(&rho, &cfg, &OpticsNoise::Exact).unwrap();
        let fid = report.recon.rho_hat.fidelity(&rho).unwrap();
        assert!(fid > 1.0 - 1e-8, "fidelity {fid}");
        assert_eq!(report.bands.len(), 4);
    }

    #[test]
    fn tomography_diagonal_state_stays_diagonal() {
        let rho = DensityMatrix::from_populations(&[0.4, 0.3, 0.2, 0.1]).unwrap();
        let cfg = OpticsConfig::new(6);
        let report = optics_tomography(&rho, &cfg, &OpticsNoise::Exact).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!(report.recon.rho_hat.element(i, j).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn tomography_cutoff_guard() {
        let rho = random_density(6, 6, 3).unwrap();
        let cfg = OpticsConfig::new(4);
        assert!(matches!(
            optics_tomography(&rho, &cfg, &OpticsNoise::Exact),
            Err(Error::CutoffTooSmall { .. })
        ));
    }

    #[test]
    fn probe_shift_equivalence_exact() {
        let rho = random_density(4, 4, 14).unwrap();
        let cfg = OpticsConfig::new(7);
        let report = probe_shift_equivalence_check(&rho, 1, &[0, 1, 2], &cfg).unwrap();
        assert!(
            report.max_discrepancy < 1e-8,
            "discrepancy {}",
            report.max_discrepancy
        );

        let diag_rho = DensityMatrix::from_populations(&[0.55, 0.25, 0.15, 0.05]).unwrap();
        let report = probe_shift_equivalence_check(&diag_rho, 1, &[0, 1], &cfg).unwrap();
        for band in &report.bands {
            for el in band {
                assert!(el.value.norm() < 1e-12);
            }
        }

        assert!(matches!(
            probe_shift_equivalence_check(&rho, 1, &[0, 7], &cfg),
            Err(Error::CutoffTooSmall { .. })
        ));
    }

    #[test]
    fn band_error_paths() {
        let rho = random_density(3, 3, 70).unwrap();
        let cfg = OpticsConfig::new(5);
        let (probe_a, probe_b) = default_probe_pair(1).unwrap();
        let dist_a = joint_distribution(&rho, &probe_a.state(5).unwrap(), &cfg).unwrap();
        let dist_b = joint_distribution(&rho, &probe_b.state(5).unwrap(), &cfg).unwrap();
        let diag = rho.diagonal();

        // Probes with parallel phases cannot be inverted.
        let parallel = ProbeSpec::new(1, 0, c(2.0, 0.0)).unwrap();
        assert!(matches!(
            reconstruct_band(&dist_a, &dist_b, &probe_a, &parallel, &cfg.bs, &diag, &cfg),
            Err(Error::DegenerateAngles { .. })
        ));

        // Probes on different subspaces are rejected.
        let other = ProbeSpec::new(2, 0, c(0.0, 1.0)).unwrap();
        assert!(matches!(
            reconstruct_band(&dist_a, &dist_b, &probe_a, &other, &cfg.bs, &diag, &cfg),
            Err(Error::ConfigInvalid(_))
        ));

        // A fully transmitting splitter pins detector I to the signal
        // photon number, so no count addresses two different elements.
        let mut through = OpticsConfig::new(5);
        through.bs = BeamSplitterParams::new(1.0, 0.0, 0.0, 0.0).unwrap();
        let ta = joint_distribution(&rho, &probe_a.state(5).unwrap(), &through).unwrap();
        let tb = joint_distribution(&rho, &probe_b.state(5).unwrap(), &through).unwrap();
        assert!(matches!(
            reconstruct_band(&ta, &tb, &probe_a, &probe_b, &through.bs, &diag, &through),
            Err(Error::VanishingAmplitude { .. })
        ));
    }

    #[test]
    fn results_independent_of_beam_splitter_phases() {
        // The amplitude-product phase enters both the distribution and the
        // effective angles, so it cancels from the recovered elements.
        use rand::{Rng, SeedableRng};
        let rho = random_density(4, 4, 61).unwrap();
        let reference =
            optics_tomography(&rho, &OpticsConfig::new(6), &OpticsNoise::Exact).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(62);
        for _ in 0..10 {
            let mut cfg = OpticsConfig::new(6);
            cfg.bs = BeamSplitterParams::new(
                0.5,
                0.5,
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
            )
            .unwrap();
            let shifted = optics_tomography(&rho, &cfg, &OpticsNoise::Exact).unwrap();
            let diff = (reference.recon.rho_hat.matrix() - shifted.recon.rho_hat.matrix())
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!(diff < 1e-9, "phase dependence {diff}");
        }
    }

    #[test]
    fn loss_only_pipeline_matches_exact() {
        let rho = random_density(4, 4, 55).unwrap();
        let cfg = OpticsConfig::new(6);
        let exact = optics_tomography(&rho, &cfg, &OpticsNoise::Exact).unwrap();
        let lossy =
            optics_tomography(&rho, &cfg, &OpticsNoise::LossOnly { efficiency: 0.8 }).unwrap();
        let diff = (exact.recon.rho_hat.matrix() - lossy.recon.rho_hat.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-6, "loss-only deviation {diff}");
    }
}
