//! The operator-basis representation: each subspace pair carries a
//! quadruplet of probe states whose projector differences form the
//! orthogonal Hermitian operators R and J. Four expectation values per pair
//! give the matrix element directly; the same operators expand arbitrary
//! matrices.
//!
//! ```bash
//! cargo run --example operator_basis
//! ```

use nalgebra::DMatrix;
use num_complex::Complex64;
use rhoscope::measure::simulate_plan_exact;
use rhoscope::recon::{
    assemble_from_basis, expand_in_basis, quadruplet_states, reconstruct_operator_basis,
    rj_operators, MeasurementPlan,
};
use rhoscope::state::{random_density, Projector};

fn main() -> rhoscope::Result<()> {
    let dim = 5;
    let rho = random_density(dim, dim, 7)?;

    // The quadruplet of the (0, 1) subspace and the element it determines.
    let [ap, am, bp, bm] = quadruplet_states(0, 1, dim)?;
    let e: Vec<f64> = [&ap, &am, &bp, &bm]
        .iter()
        .map(|s| rho.expectation(&Projector::new((*s).clone())))
        .collect::<rhoscope::Result<_>>()?;
    let element = rhoscope::recon::operator_basis_element(e[0], e[1], e[2], e[3]);
    println!(
        "quadruplet expectations (0,1): {:?}",
        e.iter()
            .map(|x| (x * 1e4).round() / 1e4)
            .collect::<Vec<_>>()
    );
    println!("rho_10 from expectations: {element:.6}");
    println!("rho_10 directly:          {:.6}", rho.element(1, 0));

    // Orthogonality of the R/J operators under the trace inner product.
    let (r01, j01) = rj_operators(0, 1, dim)?;
    let (r23, _) = rj_operators(2, 3, dim)?;
    let tr = |a: &DMatrix<Complex64>, b: &DMatrix<Complex64>| (a * b).diagonal().sum().re;
    println!(
        "\nTr(R01 R01) = {:.3}  Tr(J01 J01) = {:.3}",
        tr(&r01, &r01),
        tr(&j01, &j01)
    );
    println!(
        "Tr(R01 R23) = {:.3}  Tr(R01 J01) = {:.3}",
        tr(&r01, &r23),
        tr(&r01, &j01)
    );

    // Unique expansion of an arbitrary operator, and its reassembly.
    let q = DMatrix::from_fn(dim, dim, |i, j| {
        Complex64::new((i as f64 - 0.3 * j as f64).sin(), (i * j) as f64 * 0.1)
    });
    let coeffs = expand_in_basis(&q)?;
    let back = assemble_from_basis(&coeffs)?;
    println!("\nexpansion round-trip error: {:.3e}", (&back - &q).norm());

    // Full reconstruction through the 2N^2 - N projector plan.
    let plan = MeasurementPlan::operator_basis(dim)?;
    println!(
        "\noperator-basis plan: {} projectors (2N^2 - N = {})",
        plan.len(),
        2 * dim * dim - dim
    );
    let report = reconstruct_operator_basis(&plan, &simulate_plan_exact(&rho, &plan)?)?;
    println!("max element error: {:.3e}", report.max_element_error(&rho));
    Ok(())
}
