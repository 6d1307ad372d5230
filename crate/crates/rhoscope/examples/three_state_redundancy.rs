//! A third probe state per subspace overdetermines the coherence: its
//! m-value is a fixed linear combination of the other two. Replacing a
//! noisy m-triple by the closest point on that constraint plane reduces
//! the estimation error.
//!
//! ```bash
//! cargo run --example three_state_redundancy
//! ```

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use num_complex::Complex64;
use rhoscope::measure::{sample_expectation, ShotConfig};
use rhoscope::recon::{consistency_c, least_squares_triple, solve_pair_angles, ProjectorSpec};
use rhoscope::state::random_density;

fn main() -> rhoscope::Result<()> {
    let (alpha, beta, gamma) = (0.0, FRAC_PI_2, FRAC_PI_4);

    // Noiseless: the consistency relation is exact.
    let (r, j) = (0.31, -0.17);
    let m = |t: f64| r * t.cos() - j * t.sin();
    let predicted = consistency_c(m(alpha), m(beta), alpha, beta, gamma)?;
    println!(
        "consistency check: predicted m_c = {predicted:.12}, true m_c = {:.12}",
        m(gamma)
    );

    // Noisy: compare the two-state inversion against the plane-projected
    // triple over many repetitions, using the same draws for both.
    let rho = random_density(2, 2, 99)?;
    let truth = rho.element(0, 1);
    let diag = [rho.element(0, 0).re, rho.element(1, 1).re];
    let coeffs = [
        Complex64::from_polar(1.0, alpha),
        Complex64::from_polar(1.0, beta),
        Complex64::from_polar(1.0, gamma),
    ];
    let specs: Vec<ProjectorSpec> = coeffs
        .iter()
        .map(|a| ProjectorSpec::pair(0, 1, *a))
        .collect::<rhoscope::Result<_>>()?;

    let trials = 500;
    let shots = 10_000;
    let mut mse_pair = 0.0;
    let mut mse_triple = 0.0;
    for trial in 0..trials {
        let cfg = ShotConfig::ideal(shots, 1000 + trial)?;
        let mut ms = [0.0; 3];
        for (k, spec) in specs.iter().enumerate() {
            let est = sample_expectation(&rho, spec, &cfg, k as u64)?.estimate;
            let na2 = 1.0 / (1.0 + coeffs[k].norm_sqr());
            let big_m = est - na2 * (diag[0] + coeffs[k].norm_sqr() * diag[1]);
            ms[k] = big_m / (2.0 * coeffs[k].norm() * na2);
        }
        let (rp, jp) = solve_pair_angles(ms[0], ms[1], alpha, beta)?;
        mse_pair += (rp - truth.re).powi(2) + (jp - truth.im).powi(2);
        let (ma, mb, _) = least_squares_triple((ms[0], ms[1], ms[2]), (alpha, beta, gamma))?;
        let (rt, jt) = solve_pair_angles(ma, mb, alpha, beta)?;
        mse_triple += (rt - truth.re).powi(2) + (jt - truth.im).powi(2);
    }
    mse_pair /= trials as f64;
    mse_triple /= trials as f64;

    println!("\n{trials} trials, {shots} shots per projector:");
    println!("  two-state (R, J) MSE:   {mse_pair:.3e}");
    println!("  three-state (R, J) MSE: {mse_triple:.3e}");
    println!("  ratio triple/pair:      {:.3}", mse_triple / mse_pair);
    Ok(())
}
