//! Density operators, pure states, and rank-1 projectors.
//!
//! Everything here is dense and desk-scale (dims up to a few dozen). Values
//! are immutable after construction and safe to share across threads.
//!
//! Conventions: indices are 0-based throughout. `fidelity` uses the
//! squared-overlap convention `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`, so
//! `fidelity(pure, maximally_mixed)` is `1/N`, not `1/sqrt(N)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol::{SPECTRAL_TOL, STRUCTURAL_TOL};

/// Specification of a two-basis-state superposition `N_a (|n> + a |m>)`,
/// where `N_a = 1/sqrt(1 + |a|^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperpositionSpec {
    pub n: usize,
    pub m: usize,
    pub a: Complex64,
}

impl SuperpositionSpec {
    pub fn new(n: usize, m: usize, a: Complex64) -> Result<Self> {
        if n == m {
            return Err(Error::EqualIndices(n));
        }
        if !a.re.is_finite() || !a.im.is_finite() {
            return Err(Error::NonFinite("superposition coefficient"));
        }
        if a.norm_sqr() == 0.0 {
            return Err(Error::ZeroCoefficient);
        }
        Ok(SuperpositionSpec { n, m, a })
    }

    /// Normalization constant `N_a = 1/sqrt(1 + |a|^2)`.
    pub fn normalization(&self) -> f64 {
        1.0 / (1.0 + self.a.norm_sqr()).sqrt()
    }
}

/// A normalized state vector over the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: DVector<Complex64>,
}

impl PureState {
    /// Builds a state from amplitudes, requiring unit norm within 1e-12.
    pub fn new(amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite("state amplitudes"));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > STRUCTURAL_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(PureState { amplitudes })
    }

    /// Basis state `|k>` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::IndexOutOfRange { index: k, dim });
        }
        let mut v = DVector::from_element(dim, Complex64::default());
        v[k] = Complex64::new(1.0, 0.0);
        Ok(PureState { amplitudes: v })
    }

    /// Realizes `N_a (|n> + a |m>)` in dimension `dim`.
    pub fn superposition(spec: &SuperpositionSpec, dim: usize) -> Result<Self> {
        let spec = SuperpositionSpec::new(spec.n, spec.m, spec.a)?;
        for idx in [spec.n, spec.m] {
            if idx >= dim {
                return Err(Error::IndexOutOfRange { index: idx, dim });
            }
        }
        let na = spec.normalization();
        let mut v = DVector::from_element(dim, Complex64::default());
        v[spec.n] = Complex64::new(na, 0.0);
        v[spec.m] = spec.a * na;
        Ok(PureState { amplitudes: v })
    }

    /// Unchecked constructor for the operator-basis quadruplets, which are
    /// allowed to be unnormalized or identically zero.
    pub(crate) fn raw(amplitudes: DVector<Complex64>) -> Self {
        PureState { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, k: usize) -> Complex64 {
        self.amplitudes[k]
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }
}

/// Rank-1 projector `|psi><psi|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    state: PureState,
}

impl Projector {
    pub fn new(state: PureState) -> Self {
        Projector { state }
    }

    pub fn onto(spec: &SuperpositionSpec, dim: usize) -> Result<Self> {
        Ok(Projector::new(PureState::superposition(spec, dim)?))
    }

    pub fn state(&self) -> &PureState {
        &self.state
    }

    pub fn dim(&self) -> usize {
        self.state.dim()
    }

    /// Dense matrix realization `|psi><psi|`.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let v = self.state.amplitudes();
        let dim = v.len();
        DMatrix::from_fn(dim, dim, |i, j| v[i] * v[j].conj())
    }
}

/// Exact Hermitian symmetrization `(A + A^H)/2`. The result satisfies
/// `m[(i,j)] == conj(m[(j,i)])` bit-for-bit because IEEE negation is exact.
pub(crate) fn hermitize(mat: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = mat.nrows();
    let mut out = DMatrix::from_element(n, n, Complex64::default());
    for i in 0..n {
        out[(i, i)] = Complex64::new(mat[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let z = (mat[(i, j)] + mat[(j, i)].conj()) * 0.5;
            out[(i, j)] = z;
            out[(j, i)] = z.conj();
        }
    }
    out
}

fn asymmetry_norm(mat: &DMatrix<Complex64>) -> f64 {
    let n = mat.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        acc += mat[(i, i)].im * mat[(i, i)].im;
        for j in (i + 1)..n {
            let d = mat[(i, j)] - mat[(j, i)].conj();
            acc += d.norm_sqr();
        }
    }
    acc.sqrt()
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues plus the
/// unitary of eigenvectors (columns).
pub(crate) fn hermitian_eigen(mat: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let eig = mat.clone().symmetric_eigen();
    (eig.eigenvalues.as_slice().to_vec(), eig.eigenvectors)
}

pub(crate) fn hermitian_eigenvalues(mat: &DMatrix<Complex64>) -> Vec<f64> {
    mat.clone().symmetric_eigenvalues().as_slice().to_vec()
}

/// Eigenvalues with a relative floor: entries indistinguishable from zero at
/// working precision are flushed to exactly zero. Without this, spurious
/// eigenvalues of order 1e-16 in rank-deficient matrices get amplified to
/// 1e-8 by the square roots inside the fidelity.
fn floored_hermitian_eigen(mat: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let (mut vals, vecs) = hermitian_eigen(mat);
    let scale = vals.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
    let floor = scale * mat.nrows() as f64 * 1e-14;
    for l in &mut vals {
        if *l < floor {
            *l = 0.0;
        }
    }
    (vals, vecs)
}

/// PSD square root via eigendecomposition.
fn psd_sqrt(mat: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (vals, vecs) = floored_hermitian_eigen(mat);
    let d = DMatrix::from_diagonal(&DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&l| Complex64::new(l.sqrt(), 0.0)),
    ));
    &vecs * d * vecs.adjoint()
}

/// A density operator: Hermitian (exactly, as stored), unit trace within
/// 1e-9, positive semidefinite within 1e-9.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: DMatrix<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct DensityMatrixJson {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl DensityMatrix {
    /// Validates and stores a matrix as a density operator. The stored matrix
    /// is the exact Hermitian symmetrization of the input; the input must
    /// already be Hermitian within 1e-9.
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::NonSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        if mat.nrows() == 0 {
            return Err(Error::ConfigInvalid(
                "density matrix must have dim >= 1".into(),
            ));
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("density matrix"));
        }
        let asym = asymmetry_norm(&mat);
        if asym > SPECTRAL_TOL {
            return Err(Error::NotHermitian {
                asymmetry: asym,
                tol: SPECTRAL_TOL,
            });
        }
        let mat = hermitize(&mat);
        let trace: f64 = (0..mat.nrows()).map(|i| mat[(i, i)].re).sum();
        if (trace - 1.0).abs() > SPECTRAL_TOL {
            return Err(Error::InvalidTrace {
                trace,
                tol: SPECTRAL_TOL,
            });
        }
        let min_eig = hermitian_eigenvalues(&mat)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -SPECTRAL_TOL {
            return Err(Error::NotPositive(min_eig));
        }
        Ok(DensityMatrix { mat })
    }

    /// Internal constructor for matrices already known to be physical
    /// (e.g. outputs of `nearest_physical`).
    pub(crate) fn trusted(mat: DMatrix<Complex64>) -> Self {
        DensityMatrix {
            mat: hermitize(&mat),
        }
    }

    /// `|psi><psi|`.
    pub fn pure(state: &PureState) -> Self {
        DensityMatrix::trusted(Projector::new(state.clone()).matrix())
    }

    /// `I/N`.
    pub fn maximally_mixed(dim: usize) -> Self {
        let p = 1.0 / dim as f64;
        DensityMatrix {
            mat: DMatrix::from_diagonal(&DVector::from_element(dim, Complex64::new(p, 0.0))),
        }
    }

    /// Diagonal state from populations (must sum to 1 within 1e-9).
    pub fn from_populations(pops: &[f64]) -> Result<Self> {
        let mat = DMatrix::from_fn(pops.len(), pops.len(), |i, j| {
            if i == j {
                Complex64::new(pops[i], 0.0)
            } else {
                Complex64::default()
            }
        });
        DensityMatrix::new(mat)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn element(&self, n: usize, m: usize) -> Complex64 {
        self.mat[(n, m)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).sum()
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).collect()
    }

    /// Expectation value `<psi|rho|psi>` of a rank-1 projector, clamped to
    /// [0, 1] on return.
    pub fn expectation(&self, p: &Projector) -> Result<f64> {
        if self.dim() != p.dim() {
            return Err(Error::DimensionMismatch(self.dim(), p.dim()));
        }
        let v = p.state().amplitudes();
        let val = v.dotc(&(&self.mat * v)).re;
        Ok(val.clamp(0.0, 1.0))
    }

    /// Uhlmann fidelity, squared-overlap convention:
    /// `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`.
    pub fn fidelity(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        let s = psd_sqrt(&self.mat);
        let inner = &s * &other.mat * &s;
        let (vals, _) = floored_hermitian_eigen(&hermitize(&inner));
        let root_sum: f64 = vals.into_iter().map(f64::sqrt).sum();
        Ok(root_sum * root_sum)
    }

    /// Trace distance `(1/2) sum |eig(rho - sigma)|`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        let diff = &self.mat - &other.mat;
        Ok(0.5
            * hermitian_eigenvalues(&diff)
                .iter()
                .map(|l| l.abs())
                .sum::<f64>())
    }

    /// Largest basis index carrying any population or coherence above `tol`.
    pub fn support_max(&self, tol: f64) -> usize {
        let n = self.dim();
        (0..n)
            .rev()
            .find(|&i| {
                (0..n).any(|j| self.mat[(i, j)].norm() > tol || self.mat[(j, i)].norm() > tol)
            })
            .unwrap_or(0)
    }

    pub fn to_json_string(&self) -> String {
        let n = self.dim();
        let body = DensityMatrixJson {
            dim: n,
            re: (0..n)
                .map(|i| (0..n).map(|j| self.mat[(i, j)].re).collect())
                .collect(),
            im: (0..n)
                .map(|i| (0..n).map(|j| self.mat[(i, j)].im).collect())
                .collect(),
        };
        serde_json::to_string_pretty(&body).expect("density matrix serialization")
    }

    /// Reads the `{"dim", "re", "im"}` schema. Hermiticity is enforced by
    /// symmetrization; returns the Frobenius norm of the applied correction
    /// alongside the state.
    pub fn from_json_str(s: &str) -> Result<(Self, f64)> {
        let body: DensityMatrixJson = serde_json::from_str(s)?;
        let n = body.dim;
        if body.re.len() != n
            || body.im.len() != n
            || body.re.iter().any(|row| row.len() != n)
            || body.im.iter().any(|row| row.len() != n)
        {
            return Err(Error::ConfigInvalid(format!(
                "density matrix arrays do not match dim = {n}"
            )));
        }
        let raw = DMatrix::from_fn(n, n, |i, j| Complex64::new(body.re[i][j], body.im[i][j]));
        if raw.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("density matrix"));
        }
        let sym = hermitize(&raw);
        let correction = (&sym - &raw).norm();
        let trace: f64 = (0..n).map(|i| sym[(i, i)].re).sum();
        if (trace - 1.0).abs() > SPECTRAL_TOL {
            return Err(Error::InvalidTrace {
                trace,
                tol: SPECTRAL_TOL,
            });
        }
        let min_eig = hermitian_eigenvalues(&sym)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -SPECTRAL_TOL {
            return Err(Error::NotPositive(min_eig));
        }
        Ok((DensityMatrix { mat: sym }, correction))
    }
}

/// Random mixed state from the Ginibre ensemble: `G G^H / Tr(G G^H)` with
/// `G` a `dim x rank` matrix of standard complex Gaussians. Deterministic
/// per seed.
pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    if rank == 0 || rank > dim {
        return Err(Error::InvalidRank { rank, dim });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
    let mut g = DMatrix::from_element(dim, rank, Complex64::default());
    for i in 0..dim {
        for j in 0..rank {
            g[(i, j)] = Complex64::new(draw(), draw());
        }
    }
    let gg = &g * g.adjoint();
    let trace: f64 = (0..dim).map(|i| gg[(i, i)].re).sum();
    let rho = gg.map(|z| z / trace);
    Ok(DensityMatrix::trusted(rho))
}

/// Projects a Hermitian matrix onto the physical set by clipping negative
/// eigenvalues at zero and renormalizing to unit trace. Idempotent on
/// already-physical inputs.
pub fn nearest_physical(raw: &DMatrix<Complex64>) -> Result<DensityMatrix> {
    if raw.nrows() != raw.ncols() {
        return Err(Error::NonSquare {
            rows: raw.nrows(),
            cols: raw.ncols(),
        });
    }
    if raw.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("physicality projection input"));
    }
    let asym = asymmetry_norm(raw);
    if asym > SPECTRAL_TOL {
        return Err(Error::NotHermitian {
            asymmetry: asym,
            tol: SPECTRAL_TOL,
        });
    }
    let sym = hermitize(raw);
    let (vals, vecs) = hermitian_eigen(&sym);
    let clipped: Vec<f64> = vals.iter().map(|&l| l.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroTrace);
    }
    let d = DMatrix::from_diagonal(&DVector::from_iterator(
        clipped.len(),
        clipped.iter().map(|&l| Complex64::new(l / total, 0.0)),
    ));
    let rebuilt = &vecs * d * vecs.adjoint();
    Ok(DensityMatrix::trusted(rebuilt))
}
