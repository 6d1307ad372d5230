//! Reconstruction schemes: the minimal two-probe inversion, its three-probe
//! least-squares refinement, and the orthogonal operator-basis expansion.

pub mod basis;
pub mod minimal;
pub mod plan;
pub mod triple;

pub use basis::{
    assemble_from_basis, expand_in_basis, operator_basis_element, quadruplet_states,
    reconstruct_operator_basis, rj_operators, BasisCoefficients,
};
pub use minimal::{big_m, m_value, reconstruct_minimal, solve_pair, solve_pair_angles};
pub use plan::{AnglePair, ExpectationMap, ExpectationRecord, MeasurementPlan, ProjectorSpec};
pub use triple::{consistency_c, least_squares_triple, reconstruct_triple};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::Result;
use crate::state::{nearest_physical, DensityMatrix};

/// Which estimator produced a reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Minimal,
    Triple,
    OperatorBasis,
    Optics,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Scheme::Minimal => "minimal",
            Scheme::Triple => "triple",
            Scheme::OperatorBasis => "operator_basis",
            Scheme::Optics => "optics",
        };
        f.write_str(s)
    }
}

/// Result of a reconstruction: the physical estimate, the raw Hermitian
/// matrix before the physicality projection, and diagnostics.
#[derive(Debug, Clone)]
pub struct ReconstructionReport {
    pub rho_hat: DensityMatrix,
    /// Linear-inversion output before eigenvalue clipping; can be
    /// nonphysical under noise.
    pub raw: DMatrix<Complex64>,
    /// Elementwise |rho_hat - raw|: how far the physicality projection moved
    /// each entry.
    pub per_element_residual: DMatrix<f64>,
    pub scheme: Scheme,
    /// Worst |sin(beta - alpha)| used in any two-probe inversion; 1 for
    /// schemes without an angle solve.
    pub condition_summary: f64,
}

impl ReconstructionReport {
    pub fn max_residual(&self) -> f64 {
        self.per_element_residual
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }

    /// Largest elementwise modulus of `rho_hat - truth`.
    pub fn max_element_error(&self, truth: &DensityMatrix) -> f64 {
        (self.rho_hat.matrix() - truth.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Projects a raw Hermitian estimate onto the physical set and packages the
/// result.
pub(crate) fn assemble_report(
    raw: DMatrix<Complex64>,
    scheme: Scheme,
    condition_summary: f64,
) -> Result<ReconstructionReport> {
    let rho_hat = nearest_physical(&raw)?;
    let per_element_residual = DMatrix::from_fn(raw.nrows(), raw.ncols(), |i, j| {
        (rho_hat.matrix()[(i, j)] - raw[(i, j)]).norm()
    });
    Ok(ReconstructionReport {
        rho_hat,
        raw,
        per_element_residual,
        scheme,
        condition_summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::simulate_plan_exact;
    use crate::state::random_density;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn minimal_and_operator_basis_agree_on_exact_data() {
        for dim in 2..=8 {
            let rho = random_density(dim, dim, dim as u64 + 40).unwrap();
            let min_plan = MeasurementPlan::minimal(dim, &AnglePair::default()).unwrap();
            let ob_plan = MeasurementPlan::operator_basis(dim).unwrap();
            let min_rep =
                reconstruct_minimal(&min_plan, &simulate_plan_exact(&rho, &min_plan).unwrap())
                    .unwrap();
            let ob_rep =
                reconstruct_operator_basis(&ob_plan, &simulate_plan_exact(&rho, &ob_plan).unwrap())
                    .unwrap();
            let diff = (&min_rep.raw - &ob_rep.raw)
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!(diff < 1e-12, "dim {dim}: schemes disagree by {diff}");
        }
    }

    #[test]
    fn round_trip_over_random_angles() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..50 {
            let dim = 2 + (trial % 9);
            let rho = random_density(dim, dim, trial as u64).unwrap();
            let angles = loop {
                let alpha = rng.random_range(0.0..std::f64::consts::TAU);
                let beta = rng.random_range(0.0..std::f64::consts::TAU);
                let mag_a = rng.random_range(0.3..3.0);
                let mag_b = rng.random_range(0.3..3.0);
                if (beta - alpha).sin().abs() > 0.05 {
                    break AnglePair::new(alpha, beta, mag_a, mag_b).unwrap();
                }
            };
            let plan = MeasurementPlan::minimal(dim, &angles).unwrap();
            let data = simulate_plan_exact(&rho, &plan).unwrap();
            let report = reconstruct_minimal(&plan, &data).unwrap();
            let err = report.max_element_error(&rho);
            assert!(err < 1e-10, "trial {trial}, dim {dim}: err {err}");
        }
    }

    #[test]
    fn triple_reconstruction_matches_exact_data() {
        let dim = 5;
        let rho = random_density(dim, dim, 31).unwrap();
        let plan = MeasurementPlan::redundant_triple(
            dim,
            &AnglePair::default(),
            std::f64::consts::FRAC_PI_4,
            1.0,
        )
        .unwrap();
        let data = simulate_plan_exact(&rho, &plan).unwrap();
        let report = reconstruct_triple(&plan, &data).unwrap();
        assert!(report.max_element_error(&rho) < 1e-10);
        assert_eq!(report.scheme, Scheme::Triple);
    }

    #[test]
    fn raw_reconstruction_hermitian_by_construction() {
        let rho = random_density(6, 2, 9).unwrap();
        let plan = MeasurementPlan::minimal(6, &AnglePair::default()).unwrap();
        let data = simulate_plan_exact(&rho, &plan).unwrap();
        let report = reconstruct_minimal(&plan, &data).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(report.raw[(i, j)], report.raw[(j, i)].conj());
            }
        }
    }
}
