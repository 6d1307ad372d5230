//! Detector loss and its inversion. A detector of quantum efficiency eta
//! registers each photon independently with probability eta; the measured
//! counts are a triangular mixture of the true ones, solvable by
//! back-substitution. Below 50% efficiency the inversion still exists but
//! amplifies noise badly, so it is flagged.
//!
//! ```bash
//! cargo run --example detector_efficiency
//! ```

use rhoscope::measure::{bernoulli_loss, inverse_bernoulli, PhotonCountDistribution};
use rhoscope::optics::{optics_tomography, OpticsConfig, OpticsNoise};
use rhoscope::state::random_density;

fn main() -> rhoscope::Result<()> {
    // Two photons through an eta = 0.6 detector.
    let truth = PhotonCountDistribution::new(vec![0.0, 0.0, 1.0])?;
    let lossy = bernoulli_loss(&truth, 0.6)?;
    println!("true counts:     {:?}", truth.probs());
    println!(
        "measured at 0.6: {:?}",
        lossy
            .probs()
            .iter()
            .map(|p| (p * 1e4).round() / 1e4)
            .collect::<Vec<_>>()
    );

    let outcome = inverse_bernoulli(&lossy, 0.6)?;
    println!(
        "inverted:        {:?}",
        outcome
            .dist
            .probs()
            .iter()
            .map(|p| (p * 1e12).round() / 1e12)
            .collect::<Vec<_>>()
    );
    println!(
        "ill-conditioned flag (eta <= 0.5): {}",
        outcome.ill_conditioned
    );

    let outcome_low = inverse_bernoulli(&bernoulli_loss(&truth, 0.45)?, 0.45)?;
    println!(
        "\nat eta = 0.45 the same round trip still works ({:?})",
        outcome_low
            .dist
            .probs()
            .iter()
            .map(|p| (p * 1e9).round() / 1e9)
            .collect::<Vec<_>>()
    );
    println!(
        "but is flagged: ill_conditioned = {}",
        outcome_low.ill_conditioned
    );

    // Whole-pipeline check: degrade every histogram at eta = 0.8, invert,
    // reconstruct; the result matches the ideal-detector run.
    let rho = random_density(5, 5, 27)?;
    let cfg = OpticsConfig::new(8);
    let ideal = optics_tomography(&rho, &cfg, &OpticsNoise::Exact)?;
    let degraded = optics_tomography(&rho, &cfg, &OpticsNoise::LossOnly { efficiency: 0.8 })?;
    let diff = (ideal.recon.rho_hat.matrix() - degraded.recon.rho_hat.matrix())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    println!("\noptics pipeline at eta = 0.8 vs ideal detectors: max deviation {diff:.3e}");
    Ok(())
}
