//! Global numeric tolerances.
//!
//! One record collects every tolerance used by the crate so that structural
//! checks (exact algebra, roundoff only) and spectral checks (eigenvalue
//! computations) stay consistent across modules.

/// Crate-wide tolerance configuration.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Structural identities: normalization, Hermitian symmetry of stored
    /// values, round trips of exact linear algebra.
    pub structural: f64,
    /// Spectral quantities: traces, eigenvalue positivity.
    pub spectral: f64,
    /// Lower bound on |sin(beta - alpha)| before the two-probe inversion is
    /// rejected as degenerate. Error amplification grows as 1/|sin|.
    pub angle_cond: f64,
    /// Floor on |A_p(M,m) A_p(N,n)| below which a photon count p carries no
    /// usable information about a matrix element.
    pub amplitude: f64,
    /// Slack allowed on total probability of a photon-count distribution.
    pub dist_tail: f64,
    /// Bound on the (1/eta)^cutoff amplification of the Bernoulli inversion
    /// before it is flagged as ill-conditioned.
    pub inversion_amplification: f64,
}

pub const STRUCTURAL_TOL: f64 = 1e-12;
pub const SPECTRAL_TOL: f64 = 1e-9;
pub const ANGLE_COND_TOL: f64 = 1e-6;
pub const AMPLITUDE_TOL: f64 = 1e-8;
pub const DIST_TAIL_TOL: f64 = 1e-9;
pub const INVERSION_AMPLIFICATION_BOUND: f64 = 1e12;

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            structural: STRUCTURAL_TOL,
            spectral: SPECTRAL_TOL,
            angle_cond: ANGLE_COND_TOL,
            amplitude: AMPLITUDE_TOL,
            dist_tail: DIST_TAIL_TOL,
            inversion_amplification: INVERSION_AMPLIFICATION_BOUND,
        }
    }
}
