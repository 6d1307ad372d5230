//! Reconstruction of density operators from expectation values of rank-1
//! projectors onto single basis states and two-state superpositions.
//!
//! The crate provides:
//!
//! - [`state`]: density matrices, pure states, projectors, distances, and
//!   Ginibre test-state generation.
//! - [`recon`]: the reconstruction schemes: the minimal two-probe
//!   inversion per subspace pair, with an optional third-probe least-squares
//!   redundancy, and the orthogonal operator-basis expansion.
//! - [`measure`]: exact and finite-shot expectation values, photon-count
//!   distributions, detector-efficiency loss and its inversion.
//! - [`optics`]: the quantum-optical measurement channel: beam-splitter
//!   Fock amplitudes, joint photocount distributions for probe and signal,
//!   and band-by-band recovery of the density matrix from those
//!   distributions.
//! - [`run`]: config-driven experiment orchestration behind the `rhoscope`
//!   binary.
//!
//! Start with the `examples/` directory: each file is a runnable walkthrough
//! of one capability.
//!
//! ```
//! use rhoscope::measure::simulate_plan_exact;
//! use rhoscope::recon::{reconstruct_minimal, AnglePair, MeasurementPlan};
//! use rhoscope::state::random_density;
//!
//! let rho = random_density(4, 2, 7)?;
//! let plan = MeasurementPlan::minimal(4, &AnglePair::sensitivity_optimized())?;
//! let data = simulate_plan_exact(&rho, &plan)?;
//! let report = reconstruct_minimal(&plan, &data)?;
//! assert!(report.max_element_error(&rho) < 1e-10);
//! # Ok::<(), rhoscope::Error>(())
//! ```

pub mod error;
pub mod measure;
pub mod optics;
pub mod recon;
pub mod run;
pub mod state;
pub mod tol;

pub use error::{Error, Result};
pub use state::{
    nearest_physical, random_density, DensityMatrix, Projector, PureState, SuperpositionSpec,
};
pub use tol::Tolerances;
