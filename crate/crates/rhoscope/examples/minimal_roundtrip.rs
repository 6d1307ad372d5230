//! The minimal scheme end to end: N diagonal projectors plus two
//! superposition projectors per subspace pair determine every element of
//! the density matrix, with no recursion between elements.
//!
//! ```bash
//! cargo run --example minimal_roundtrip
//! ```

use rhoscope::measure::simulate_plan_exact;
use rhoscope::recon::{reconstruct_minimal, AnglePair, MeasurementPlan};
use rhoscope::state::random_density;

fn main() -> rhoscope::Result<()> {
    let dim = 6;
    let rho = random_density(dim, 3, 2024)?;

    // Sensitivity-optimized probes: a = 1, b = i.
    let angles = AnglePair::sensitivity_optimized();
    let plan = MeasurementPlan::minimal(dim, &angles)?;
    println!(
        "dim {dim}: measuring {} projectors (N^2 = {})",
        plan.len(),
        dim * dim
    );

    let data = simulate_plan_exact(&rho, &plan)?;
    let report = reconstruct_minimal(&plan, &data)?;

    println!("scheme:              {}", report.scheme);
    println!(
        "max element error:   {:.3e}",
        report.max_element_error(&rho)
    );
    println!("physicality residual {:.3e}", report.max_residual());
    println!(
        "fidelity:            {:.12}",
        report.rho_hat.fidelity(&rho)?
    );

    println!("\nreconstructed matrix (real part):");
    for i in 0..dim {
        let row: Vec<String> = (0..dim)
            .map(|j| format!("{:+.4}", report.rho_hat.element(i, j).re))
            .collect();
        println!("  [{}]", row.join(", "));
    }
    Ok(())
}
