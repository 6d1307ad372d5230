//! Joint photocount distribution of the beam-splitter outputs.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::optics::amplitude::AmplitudeTable;
use crate::optics::{JointPhotonDistribution, OpticsConfig};
use crate::state::{DensityMatrix, PureState};

const SUPPORT_TOL: f64 = 1e-14;

fn probe_support(probe: &PureState) -> Vec<usize> {
    (0..probe.dim())
        .filter(|&k| probe.amplitude(k).norm() > SUPPORT_TOL)
        .collect()
}

/// The joint probability `P(p, q)` of counting `p` photons at detector I
/// and `q` at detector II, with the signal `rho` in one input port and the
/// probe `psi` in the other:
///
/// ```text
/// P(p, q) = sum_{n', m' <= p+q} rho_{n'm'} psi_{p+q-n'} psi*_{p+q-m'}
///           A_p(n', p+q-n') A*_p(m', p+q-m')
/// ```
///
/// Both inputs must be supported within `cfg.cutoff`; the grid then holds
/// the full distribution exactly and sums to 1.
pub fn joint_distribution(
    rho: &DensityMatrix,
    probe: &PureState,
    cfg: &OpticsConfig,
) -> Result<JointPhotonDistribution> {
    let signal_max = rho.support_max(SUPPORT_TOL);
    if signal_max > cfg.cutoff {
        return Err(Error::CutoffTooSmall {
            cutoff: cfg.cutoff,
            required: signal_max,
        });
    }
    let support = probe_support(probe);
    let probe_max = support.last().copied().unwrap_or(0);
    if probe_max > cfg.cutoff {
        return Err(Error::CutoffTooSmall {
            cutoff: cfg.cutoff,
            required: probe_max,
        });
    }

    let max_total = signal_max + probe_max;
    let table = AmplitudeTable::new(&cfg.bs, max_total)?;
    let mut out = JointPhotonDistribution::zeros(cfg.cutoff);

    for total in 0..=max_total {
        for p in 0..=total {
            let q = total - p;
            let mut acc = Complex64::default();
            for &s1 in &support {
                if s1 > total {
                    continue;
                }
                let n1 = total - s1;
                if n1 > signal_max {
                    continue;
                }
                let left = probe.amplitude(s1) * table.get(p, n1, s1);
                for &s2 in &support {
                    if s2 > total {
                        continue;
                    }
                    let n2 = total - s2;
                    if n2 > signal_max {
                        continue;
                    }
                    let right = (probe.amplitude(s2) * table.get(p, n2, s2)).conj();
                    acc += rho.element(n1, n2) * left * right;
                }
            }
            out.set(p, q, acc.re);
        }
    }
    Ok(out)
}
