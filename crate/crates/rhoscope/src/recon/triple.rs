//! Three-probe redundancy: a third probe state `c = |c| e^{i gamma}` in each
//! subspace overdetermines `(R, J)`. Its noiseless m-value is fixed by the
//! other two, so noisy triples can be replaced by the closest point on that
//! constraint plane before inverting.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::recon::minimal::{big_m, diagonal_estimates, m_value, solve_pair_angles};
use crate::recon::plan::{ExpectationMap, MeasurementPlan, ProjectorSpec};
use crate::recon::{assemble_report, ReconstructionReport, Scheme};
use crate::tol::ANGLE_COND_TOL;

/// The m-value the third probe must show if the first two are exact:
/// `m_c = [m_a sin(beta - gamma) - m_b sin(alpha - gamma)] / sin(beta - alpha)`.
pub fn consistency_c(m_a: f64, m_b: f64, alpha: f64, beta: f64, gamma: f64) -> Result<f64> {
    let denom = (beta - alpha).sin();
    if denom.abs() < ANGLE_COND_TOL {
        return Err(Error::DegenerateAngles {
            sine: denom.abs(),
            tol: ANGLE_COND_TOL,
        });
    }
    Ok((m_a * (beta - gamma).sin() - m_b * (alpha - gamma).sin()) / denom)
}

fn plane_coefficients(alpha: f64, beta: f64, gamma: f64) -> Result<(f64, f64)> {
    for (x, y) in [(alpha, beta), (alpha, gamma), (beta, gamma)] {
        let sine = (y - x).sin().abs();
        if sine < ANGLE_COND_TOL {
            return Err(Error::DegenerateAngles {
                sine,
                tol: ANGLE_COND_TOL,
            });
        }
    }
    let denom = (beta - alpha).sin();
    Ok(((beta - gamma).sin() / denom, -(alpha - gamma).sin() / denom))
}

/// Orthogonal projection of a measured m-value triple onto the plane
/// `z = c1 x + c2 y` defined by the consistency relation. The output
/// satisfies [`consistency_c`] exactly; points already on the plane are
/// returned unchanged.
pub fn least_squares_triple(
    meas: (f64, f64, f64),
    angles: (f64, f64, f64),
) -> Result<(f64, f64, f64)> {
    let (alpha, beta, gamma) = angles;
    let (c1, c2) = plane_coefficients(alpha, beta, gamma)?;
    let (x, y, z) = meas;
    // Plane normal is (c1, c2, -1); remove the off-plane component.
    let nn = c1 * c1 + c2 * c2 + 1.0;
    let excess = (c1 * x + c2 * y - z) / nn;
    Ok((x - excess * c1, y - excess * c2, z + excess))
}

/// Reconstruction using three probes per subspace pair: the measured
/// m-triples are projected onto their consistency plane, then the first two
/// projected values are inverted as in the minimal scheme.
pub fn reconstruct_triple(
    plan: &MeasurementPlan,
    data: &ExpectationMap,
) -> Result<ReconstructionReport> {
    let dim = plan.dim();
    let diag = diagonal_estimates(plan, data)?;
    let mut raw = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex64::new(diag[i], 0.0)
        } else {
            Complex64::default()
        }
    });

    let mut worst_sine = f64::INFINITY;
    for ((n, m), probes) in plan.pair_groups() {
        if probes.len() != 3 {
            return Err(Error::ConfigInvalid(format!(
                "triple reconstruction needs exactly three probes per pair, got {} for ({n}, {m})",
                probes.len()
            )));
        }
        let mut ms = [0.0; 3];
        for (slot, spec) in probes.iter().enumerate() {
            let e = data.lookup(&ProjectorSpec::TwoState(*spec))?;
            ms[slot] = m_value(big_m(e, diag[n], diag[m], spec.a)?, spec.a)?;
        }
        let (alpha, beta, gamma) = (probes[0].a.arg(), probes[1].a.arg(), probes[2].a.arg());
        let (ma, mb, _mc) = least_squares_triple((ms[0], ms[1], ms[2]), (alpha, beta, gamma))?;
        let (r, j) = solve_pair_angles(ma, mb, alpha, beta)?;
        worst_sine = worst_sine.min((beta - alpha).sin().abs());
        raw[(n, m)] = Complex64::new(r, j);
        raw[(m, n)] = Complex64::new(r, -j);
    }

    assemble_report(raw, Scheme::Triple, worst_sine)
}
