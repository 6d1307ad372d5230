//! Probe-shift redundancy: only the index difference n - m of the probe
//! superposition decides which diagonal band is recovered, so the probe
//! pairs on (1,0), (2,1), (3,2), ... are interchangeable. On exact data
//! they reconstruct identical elements.
//!
//! ```bash
//! cargo run --example probe_shift
//! ```

use rhoscope::optics::{probe_shift_equivalence_check, OpticsConfig};
use rhoscope::state::random_density;

fn main() -> rhoscope::Result<()> {
    let rho = random_density(5, 5, 41)?;
    let cfg = OpticsConfig::new(9);

    for band_offset in 1..=2 {
        let report = probe_shift_equivalence_check(&rho, band_offset, &[0, 1, 2], &cfg)?;
        println!(
            "band {band_offset}: shifts {:?}, max pairwise discrepancy {:.3e}",
            report.offsets, report.max_discrepancy
        );
        for (t, band) in report.offsets.iter().zip(&report.bands) {
            let first = band.first().expect("band has elements");
            println!(
                "  probes on ({}, {t}): rho[{},{}] = {:+.6} {:+.6}i",
                t + band_offset,
                first.row,
                first.col,
                first.value.re,
                first.value.im
            );
        }
    }
    Ok(())
}
