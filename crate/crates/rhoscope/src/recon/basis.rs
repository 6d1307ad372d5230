//! The orthogonal operator-basis representation.
//!
//! Each subspace pair `(n, m)` carries a quadruplet of probe states
//! `(|n> +- |m>)/sqrt(2)` and `(|n> +- i|m>)/sqrt(2)`. Differences of the
//! corresponding projectors form Hermitian operators `R^{nm}`, `J^{nm}`
//! that are mutually orthogonal under the trace inner product and span the
//! full operator space, so any matrix element is a linear combination of
//! four projector expectations.
//!
//! Sign convention: `J^{nm} = (B+ - B-)/sqrt(2) = i(|m><n| - |n><m|)/sqrt(2)`.
//! This is the unique choice under which the expansion coefficients
//! `j_nm = i(Q_mn - Q_nm)/2` reassemble the operator and reduce to
//! `Im Q_nm` for Hermitian `Q`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::recon::minimal::diagonal_estimates;
use crate::recon::plan::{ExpectationMap, MeasurementPlan, ProjectorSpec};
use crate::recon::{assemble_report, ReconstructionReport, Scheme};
use crate::state::PureState;

/// The probe quadruplet `(a+, a-, b+, b-)` of the `(n, m)` subspace in
/// dimension `dim`.
///
/// For `n = m` the formulas degenerate: `a+` is the unnormalized
/// `sqrt(2)|n>` while the other three are identically zero. Such states are
/// representable here only; the state-core constructors reject them.
pub fn quadruplet_states(n: usize, m: usize, dim: usize) -> Result<[PureState; 4]> {
    for idx in [n, m] {
        if idx >= dim {
            return Err(Error::IndexOutOfRange { index: idx, dim });
        }
    }
    if n == m {
        let mut v = DVector::from_element(dim, Complex64::default());
        v[n] = Complex64::new(2.0_f64.sqrt(), 0.0);
        let zero = || PureState::raw(DVector::from_element(dim, Complex64::default()));
        return Ok([PureState::raw(v), zero(), zero(), zero()]);
    }
    let half = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let make = |coeff: Complex64| {
        let mut v = DVector::from_element(dim, Complex64::default());
        v[n] = half;
        v[m] = coeff * half;
        PureState::raw(v)
    };
    Ok([
        make(Complex64::new(1.0, 0.0)),
        make(Complex64::new(-1.0, 0.0)),
        make(Complex64::new(0.0, 1.0)),
        make(Complex64::new(0.0, -1.0)),
    ])
}

/// Combines the four quadruplet expectations into the matrix element
/// `rho_mn = (<A+> - <A-> + i(<B+> - <B->)) / 2`.
pub fn operator_basis_element(
    e_a_plus: f64,
    e_a_minus: f64,
    e_b_plus: f64,
    e_b_minus: f64,
) -> Complex64 {
    Complex64::new((e_a_plus - e_a_minus) / 2.0, (e_b_plus - e_b_minus) / 2.0)
}

/// The Hermitian basis operators of the `(n, m)` subspace:
/// `R^{nm} = (|n><m| + |m><n|)/sqrt(2)` and
/// `J^{nm} = i(|m><n| - |n><m|)/sqrt(2)`.
///
/// For `n = m` these reduce to `R^{nn} = sqrt(2)|n><n|` and `J^{nn} = 0`.
pub fn rj_operators(
    n: usize,
    m: usize,
    dim: usize,
) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    for idx in [n, m] {
        if idx >= dim {
            return Err(Error::IndexOutOfRange { index: idx, dim });
        }
    }
    let s = 1.0 / 2.0_f64.sqrt();
    let mut r = DMatrix::from_element(dim, dim, Complex64::default());
    let mut j = DMatrix::from_element(dim, dim, Complex64::default());
    r[(n, m)] += Complex64::new(s, 0.0);
    r[(m, n)] += Complex64::new(s, 0.0);
    j[(m, n)] += Complex64::new(0.0, s);
    j[(n, m)] -= Complex64::new(0.0, s);
    Ok((r, j))
}

/// Expansion coefficients of a square matrix over the `R`/`J` basis,
/// stored at `(n, m)` with `n <= m` (the `j` diagonal is identically zero).
#[derive(Debug, Clone)]
pub struct BasisCoefficients {
    pub r: DMatrix<Complex64>,
    pub j: DMatrix<Complex64>,
}

/// Coefficients `r_nm = Tr(Q R^{mn})/sqrt(2) = (Q_mn + Q_nm)/2` and
/// `j_nm = Tr(Q J^{mn})/sqrt(2) = i(Q_mn - Q_nm)/2` of an arbitrary square
/// matrix. For Hermitian input both tables are real.
pub fn expand_in_basis(q: &DMatrix<Complex64>) -> Result<BasisCoefficients> {
    if q.nrows() != q.ncols() {
        return Err(Error::NonSquare {
            rows: q.nrows(),
            cols: q.ncols(),
        });
    }
    let dim = q.nrows();
    let mut r = DMatrix::from_element(dim, dim, Complex64::default());
    let mut j = DMatrix::from_element(dim, dim, Complex64::default());
    let i = Complex64::new(0.0, 1.0);
    for n in 0..dim {
        for m in n..dim {
            r[(n, m)] = (q[(m, n)] + q[(n, m)]) * 0.5;
            if n != m {
                j[(n, m)] = i * (q[(m, n)] - q[(n, m)]) * 0.5;
            }
        }
    }
    Ok(BasisCoefficients { r, j })
}

/// Reassembles the matrix from its coefficient table:
/// `Q = sqrt(2) sum_{n<m} (r_nm R^{mn} + j_nm J^{mn}) + (1/sqrt(2)) sum_m r_mm R^{mm}`.
pub fn assemble_from_basis(coeffs: &BasisCoefficients) -> Result<DMatrix<Complex64>> {
    let dim = coeffs.r.nrows();
    if coeffs.r.ncols() != dim || coeffs.j.nrows() != dim || coeffs.j.ncols() != dim {
        return Err(Error::NonSquare {
            rows: coeffs.r.nrows(),
            cols: coeffs.r.ncols(),
        });
    }
    let root2 = Complex64::new(2.0_f64.sqrt(), 0.0);
    let mut q = DMatrix::from_element(dim, dim, Complex64::default());
    for n in 0..dim {
        for m in n..dim {
            if n == m {
                let (r_op, _) = rj_operators(m, m, dim)?;
                q += r_op.map(|z| z * coeffs.r[(m, m)] / root2);
            } else {
                let (r_op, j_op) = rj_operators(m, n, dim)?;
                q += r_op.map(|z| z * coeffs.r[(n, m)] * root2);
                q += j_op.map(|z| z * coeffs.j[(n, m)] * root2);
            }
        }
    }
    Ok(q)
}

/// Reconstruction through the operator basis: diagonals from the basis-state
/// projectors, each coherence from its quadruplet of expectations.
pub fn reconstruct_operator_basis(
    plan: &MeasurementPlan,
    data: &ExpectationMap,
) -> Result<ReconstructionReport> {
    let dim = plan.dim();
    let diag = diagonal_estimates(plan, data)?;
    let mut raw = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex64::new(diag[i], 0.0)
        } else {
            Complex64::default()
        }
    });

    for ((n, m), probes) in plan.pair_groups() {
        if probes.len() != 4 {
            return Err(Error::ConfigInvalid(format!(
                "operator-basis reconstruction needs four probes per pair, got {} for ({n}, {m})",
                probes.len()
            )));
        }
        // Plan order is (+1, -1, +i, -i).
        let mut e = [0.0; 4];
        for (slot, spec) in probes.iter().enumerate() {
            e[slot] = data.lookup(&ProjectorSpec::TwoState(*spec))?;
        }
        let rho_mn = operator_basis_element(e[0], e[1], e[2], e[3]);
        raw[(m, n)] = rho_mn;
        raw[(n, m)] = rho_mn.conj();
    }

    assemble_report(raw, Scheme::OperatorBasis, 1.0)
}
