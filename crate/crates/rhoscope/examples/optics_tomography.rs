//! Full optical tomography: probe superpositions interfere with the signal
//! on a beam splitter, the two detectors build joint photocount
//! distributions, and each probe pair yields one diagonal band of the
//! density matrix. Diagonals come from photon counting of the signal
//! alone.
//!
//! ```bash
//! cargo run --release --example optics_tomography
//! ```

use rhoscope::measure::ShotConfig;
use rhoscope::optics::{optics_tomography, OpticsConfig, OpticsNoise};
use rhoscope::state::random_density;

fn main() -> rhoscope::Result<()> {
    let dim = 6;
    let rho = random_density(dim, 3, 314)?;
    let cfg = OpticsConfig::new(10);

    // Exact distributions: the pipeline inverts perfectly.
    let exact = optics_tomography(&rho, &cfg, &OpticsNoise::Exact)?;
    println!("exact pipeline:");
    println!(
        "  fidelity:       {:.12}",
        exact.recon.rho_hat.fidelity(&rho)?
    );
    println!(
        "  trace distance: {:.3e}",
        exact.recon.rho_hat.trace_distance(&rho)?
    );
    for band in &exact.bands {
        let worst = band
            .elements
            .iter()
            .map(|el| (el.value - rho.element(el.row, el.col)).norm())
            .fold(0.0, f64::max);
        println!(
            "  band {} ({} elements, probes {} / {}): max error {:.3e}",
            band.offset,
            band.elements.len(),
            band.probe_a.label('a'),
            band.probe_b.label('b'),
            worst
        );
    }

    // Finite photocount statistics.
    println!("\nfinite statistics (per-histogram shots):");
    for shots in [10_000u64, 1_000_000] {
        let noise = OpticsNoise::Shots(ShotConfig::ideal(shots, 5)?);
        let report = optics_tomography(&rho, &cfg, &noise)?;
        println!(
            "  {shots:>9} shots: trace distance {:.4e}",
            report.recon.rho_hat.trace_distance(&rho)?
        );
    }
    Ok(())
}
