//! Beam-splitter Fock amplitudes and the Hong-Ou-Mandel dip: two identical
//! photons meeting on a balanced splitter never trigger both detectors at
//! once.
//!
//! ```bash
//! cargo run --example hong_ou_mandel
//! ```

use rhoscope::optics::{bs_amplitude, joint_distribution, BeamSplitterParams, OpticsConfig};
use rhoscope::state::{DensityMatrix, PureState};

fn main() -> rhoscope::Result<()> {
    let balanced = BeamSplitterParams::balanced();

    println!("amplitudes A_p(1,1) on a 50:50 splitter:");
    for p in 0..=2 {
        let a = bs_amplitude(p, 1, 1, &balanced)?;
        println!(
            "  p = {p}: {:+.6} {:+.6}i   |A|^2 = {:.4}",
            a.re,
            a.im,
            a.norm_sqr()
        );
    }

    // Unitarity: the outputs exhaust the possibilities for any input pair.
    for (nu, mu) in [(2usize, 3usize), (5, 4), (8, 0)] {
        let mut total = 0.0;
        for p in 0..=(nu + mu) {
            total += bs_amplitude(p, nu, mu, &balanced)?.norm_sqr();
        }
        println!("sum_p |A_p({nu},{mu})|^2 = {total:.12}");
    }

    // The coincidence dip in the joint photocount distribution.
    let signal = DensityMatrix::pure(&PureState::basis(2, 1)?);
    let probe = PureState::basis(5, 1)?;
    let joint = joint_distribution(&signal, &probe, &OpticsConfig::new(4))?;
    println!("\njoint counts for |1> meeting |1>:");
    for (p, q) in [(2, 0), (1, 1), (0, 2)] {
        println!("  P({p},{q}) = {:.4}", joint.prob(p, q));
    }

    // Away from 50:50 the coincidences return.
    let tilted = BeamSplitterParams::new(0.7, 0.3, 0.0, 0.0)?;
    let mut cfg = OpticsConfig::new(4);
    cfg.bs = tilted;
    let joint = joint_distribution(&signal, &probe, &cfg)?;
    println!(
        "\nat 70:30 the dip fills in: P(1,1) = {:.4}",
        joint.prob(1, 1)
    );
    Ok(())
}
