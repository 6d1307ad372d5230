//! The minimal reconstruction scheme: per subspace pair `(n, m)`, two
//! superposition-projector expectations are reduced to the m-values
//! `m = R cos(angle) - J sin(angle)` and inverted for the real and imaginary
//! parts `R, J` of the coherence `rho_nm`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::recon::plan::{AnglePair, ExpectationMap, MeasurementPlan, ProjectorSpec};
use crate::recon::{assemble_report, ReconstructionReport, Scheme};
use crate::tol::ANGLE_COND_TOL;

/// Strips the known diagonal contribution from a superposition-projector
/// expectation value:
/// `M = <A> - N_a^2 (rho_nn + |a|^2 rho_mm) = N_a^2 (a rho_nm + a* rho_mn)`.
pub fn big_m(expect_a: f64, rho_nn: f64, rho_mm: f64, a: Complex64) -> Result<f64> {
    if ![expect_a, rho_nn, rho_mm, a.re, a.im]
        .iter()
        .all(|x| x.is_finite())
    {
        return Err(Error::NonFinite("big_m input"));
    }
    let na2 = 1.0 / (1.0 + a.norm_sqr());
    Ok(expect_a - na2 * (rho_nn + a.norm_sqr() * rho_mm))
}

/// Normalizes `M` to the m-value `m = M / (2 |a| N_a^2) = R cos a - J sin a`.
pub fn m_value(big_m: f64, a: Complex64) -> Result<f64> {
    let mag = a.norm();
    if mag == 0.0 {
        return Err(Error::ZeroCoefficient);
    }
    let na2 = 1.0 / (1.0 + mag * mag);
    Ok(big_m / (2.0 * mag * na2))
}

/// Inverts the pair of m-values for `(R, J)` at probe phase angles
/// `(alpha, beta)`:
///
/// ```text
/// (R)   1            ( sin beta  -sin alpha ) (m_a)
/// ( ) = ------------ (                      ) (   )
/// (J)   sin(b - a)   ( cos beta  -cos alpha ) (m_b)
/// ```
pub fn solve_pair_angles(m_a: f64, m_b: f64, alpha: f64, beta: f64) -> Result<(f64, f64)> {
    let sine = (beta - alpha).sin();
    if sine.abs() < ANGLE_COND_TOL {
        return Err(Error::DegenerateAngles {
            sine: sine.abs(),
            tol: ANGLE_COND_TOL,
        });
    }
    let r = (beta.sin() * m_a - alpha.sin() * m_b) / sine;
    let j = (beta.cos() * m_a - alpha.cos() * m_b) / sine;
    Ok((r, j))
}

/// `solve_pair_angles` with the angles taken from an [`AnglePair`].
pub fn solve_pair(m_a: f64, m_b: f64, angles: &AnglePair) -> Result<(f64, f64)> {
    solve_pair_angles(m_a, m_b, angles.alpha, angles.beta)
}

/// Renormalized diagonal estimates pulled from the data. All `dim` diagonal
/// projectors must be present; the estimates are rescaled to unit sum so
/// that no basis state is privileged under noise.
pub(crate) fn diagonal_estimates(
    plan: &MeasurementPlan,
    data: &ExpectationMap,
) -> Result<Vec<f64>> {
    let dim = plan.dim();
    let mut diag = Vec::with_capacity(dim);
    for n in 0..dim {
        let spec = ProjectorSpec::Diagonal(n);
        if !plan.specs().iter().any(|s| s == &spec) {
            return Err(Error::MissingExpectation(spec.label()));
        }
        diag.push(data.lookup(&spec)?);
    }
    let total: f64 = diag.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroTrace);
    }
    for d in &mut diag {
        *d /= total;
    }
    Ok(diag)
}

/// Reconstructs the density matrix from a minimal plan and its expectation
/// values: diagonals renormalized to unit sum, each coherence solved from
/// the two probe m-values, and the raw Hermitian estimate projected onto
/// the physical set.
pub fn reconstruct_minimal(
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
        if probes.len() != 2 {
            return Err(Error::ConfigInvalid(format!(
                "minimal reconstruction needs exactly two probes per pair, got {} for ({n}, {m})",
                probes.len()
            )));
        }
        let (sa, sb) = (probes[0], probes[1]);
        let e_a = data.lookup(&ProjectorSpec::TwoState(sa))?;
        let e_b = data.lookup(&ProjectorSpec::TwoState(sb))?;
        let m_a = m_value(big_m(e_a, diag[n], diag[m], sa.a)?, sa.a)?;
        let m_b = m_value(big_m(e_b, diag[n], diag[m], sb.a)?, sb.a)?;
        let (alpha, beta) = (sa.a.arg(), sb.a.arg());
        let (r, j) = solve_pair_angles(m_a, m_b, alpha, beta)?;
        worst_sine = worst_sine.min((beta - alpha).sin().abs());
        raw[(n, m)] = Complex64::new(r, j);
        raw[(m, n)] = Complex64::new(r, -j);
    }

    assemble_report(raw, Scheme::Minimal, worst_sine)
}
