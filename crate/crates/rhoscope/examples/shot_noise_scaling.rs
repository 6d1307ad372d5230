//! Finite-shot reconstruction error falls off as 1/sqrt(shots): each
//! projector expectation is a binomial estimate, and the linear inversion
//! carries that statistical error straight through.
//!
//! ```bash
//! cargo run --release --example shot_noise_scaling
//! ```

use rhoscope::measure::{simulate_plan_shots, ShotConfig};
use rhoscope::recon::{reconstruct_minimal, AnglePair, MeasurementPlan};
use rhoscope::state::random_density;

fn main() -> rhoscope::Result<()> {
    let dim = 4;
    let trials = 40;
    let rho = random_density(dim, dim, 11)?;
    let plan = MeasurementPlan::minimal(dim, &AnglePair::sensitivity_optimized())?;

    println!(
        "{:>10}  {:>16}  {:>18}",
        "shots", "mean trace dist", "x sqrt(shots)"
    );
    for level in [1_000u64, 10_000, 100_000, 1_000_000] {
        let mut acc = 0.0;
        for trial in 0..trials {
            let cfg = ShotConfig::ideal(level, 7000 + trial)?;
            let data = simulate_plan_shots(&rho, &plan, &cfg)?;
            let report = reconstruct_minimal(&plan, &data)?;
            acc += report.rho_hat.trace_distance(&rho)?;
        }
        let mean = acc / trials as f64;
        println!(
            "{level:>10}  {mean:>16.6e}  {:>18.4}",
            mean * (level as f64).sqrt()
        );
    }
    println!("\nthe last column is flat when the error scales as shots^(-1/2)");
    Ok(())
}
