//! Beam-splitter Fock amplitudes.
//!
//! `bs_amplitude(p, nu, mu, bs)` is the probability amplitude of finding
//! `p` photons at detector I when the input ports carry the product Fock
//! state `|nu>_1 |mu>_2`:
//!
//! ```text
//! A_p(nu, mu) = (-1)^nu sqrt(p! (nu+mu-p)! / (nu! mu!))
//!               e^{i phi_tau (p - mu)} e^{i phi_rho (p - nu)}
//!               sum_{k+l=p} (-1)^k C(nu,k) C(mu,l)
//!                           sqrt(tau^(mu+k-l) rho^(nu-k+l))
//! ```
//!
//! Factorials enter through a cached log-factorial table and each term is
//! assembled from its log magnitude, so the amplitudes stay finite well
//! beyond the photon numbers used here.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::optics::BeamSplitterParams;

const LN_FACTORIAL_MAX: usize = 1024;

fn ln_factorial(k: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LN_FACTORIAL_MAX + 1);
        t.push(0.0);
        for i in 1..=LN_FACTORIAL_MAX {
            t.push(t[i - 1] + (i as f64).ln());
        }
        t
    });
    table[k]
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// `base^(half_exp / 2)` for integer `half_exp >= 0`, exact at `base = 0`.
fn half_power(base: f64, half_exp: usize) -> f64 {
    if half_exp == 0 {
        1.0
    } else {
        base.powf(half_exp as f64 / 2.0)
    }
}

/// The Fock-state beam-splitter amplitude `A_p(nu, mu)`.
pub fn bs_amplitude(p: usize, nu: usize, mu: usize, bs: &BeamSplitterParams) -> Result<Complex64> {
    if p > nu + mu {
        return Err(Error::IndexOutOfRange {
            index: p,
            dim: nu + mu + 1,
        });
    }
    let prefactor_mag = (0.5
        * (ln_factorial(p) + ln_factorial(nu + mu - p) - ln_factorial(nu) - ln_factorial(mu)))
    .exp();
    let prefactor_sign = if nu % 2 == 0 { 1.0 } else { -1.0 };
    let phase = bs.phi_tau * (p as f64 - mu as f64) + bs.phi_rho * (p as f64 - nu as f64);

    let mut sum = 0.0;
    let k_lo = p.saturating_sub(mu);
    let k_hi = nu.min(p);
    for k in k_lo..=k_hi {
        let l = p - k;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let mag = (ln_binomial(nu, k) + ln_binomial(mu, l)).exp()
            * half_power(bs.tau, mu + k - l)
            * half_power(bs.refl, nu - k + l);
        sum += sign * mag;
    }

    Ok(Complex64::from_polar(1.0, phase) * (prefactor_sign * prefactor_mag * sum))
}

/// All amplitudes `A_p(nu, mu)` with `nu + mu <= max_total`, computed once
/// and shared read-only across band reconstructions.
#[derive(Debug, Clone)]
pub struct AmplitudeTable {
    max_total: usize,
    // indexed [nu][mu][p]
    data: Vec<Vec<Vec<Complex64>>>,
}

impl AmplitudeTable {
    pub fn new(bs: &BeamSplitterParams, max_total: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(max_total + 1);
        for nu in 0..=max_total {
            let mut row = Vec::with_capacity(max_total - nu + 1);
            for mu in 0..=(max_total - nu) {
                let amps = (0..=(nu + mu))
                    .map(|p| bs_amplitude(p, nu, mu, bs))
                    .collect::<Result<Vec<_>>>()?;
                row.push(amps);
            }
            data.push(row);
        }
        Ok(AmplitudeTable { max_total, data })
    }

    pub fn max_total(&self) -> usize {
        self.max_total
    }

    /// `A_p(nu, mu)`; zero outside `0 <= p <= nu + mu`.
    pub fn get(&self, p: usize, nu: usize, mu: usize) -> Complex64 {
        if nu + mu > self.max_total || p > nu + mu {
            return Complex64::default();
        }
        self.data[nu][mu][p]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn vacuum_amplitude_is_unity() {
        for bs in [
            BeamSplitterParams::balanced(),
            BeamSplitterParams::new(0.3, 0.7, 0.4, -1.1).unwrap(),
        ] {
            let a = bs_amplitude(0, 0, 0, &bs).unwrap();
            assert_abs_diff_eq!(a.re, 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn hong_ou_mandel_cancellation() {
        let bs = BeamSplitterParams::balanced();
        let a = bs_amplitude(1, 1, 1, &bs).unwrap();
        assert_abs_diff_eq!(a.norm(), 0.0, epsilon = 1e-15);
        // The two photons bunch: |A_0|^2 = |A_2|^2 = 1/2.
        assert_abs_diff_eq!(
            bs_amplitude(0, 1, 1, &bs).unwrap().norm_sqr(),
            0.5,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            bs_amplitude(2, 1, 1, &bs).unwrap().norm_sqr(),
            0.5,
            epsilon = 1e-14
        );
    }

    #[test]
    fn single_photon_splitting() {
        let bs = BeamSplitterParams::new(0.6, 0.4, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(
            bs_amplitude(1, 1, 0, &bs).unwrap().norm_sqr(),
            0.6,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            bs_amplitude(0, 1, 0, &bs).unwrap().norm_sqr(),
            0.4,
            epsilon = 1e-14
        );
    }

    #[test]
    fn out_of_range_p_rejected() {
        let bs = BeamSplitterParams::balanced();
        assert!(matches!(
            bs_amplitude(3, 1, 1, &bs),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn unitarity_over_random_beam_splitters() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for trial in 0..50 {
            let tau: f64 = rng.random_range(0.0..=1.0);
            let bs = BeamSplitterParams::new(
                tau,
                1.0 - tau,
                rng.random_range(-3.2..3.2),
                rng.random_range(-3.2..3.2),
            )
            .unwrap();
            for nu in 0..=12usize {
                for mu in 0..=(12 - nu) {
                    let total: f64 = (0..=(nu + mu))
                        .map(|p| bs_amplitude(p, nu, mu, &bs).unwrap().norm_sqr())
                        .sum();
                    assert!(
                        (total - 1.0).abs() < 1e-12,
                        "trial {trial}: sum_p |A_p({nu},{mu})|^2 = {total}"
                    );
                }
            }
        }
    }

    /// Independent oracle: expand the transformed creation operators
    /// binomially. With `U a1+ U+ = c11 b1+ + c12 b2+` and
    /// `U a2+ U+ = c21 b1+ + c22 b2+`, the output amplitude on
    /// `|p, nu+mu-p>` is
    /// `sqrt(p!(nu+mu-p)!/(nu!mu!)) sum_{k+l=p} C(nu,k)C(mu,l)
    ///  c11^k c12^(nu-k) c21^l c22^(mu-l)`.
    fn amplitude_by_operator_expansion(
        p: usize,
        nu: usize,
        mu: usize,
        bs: &BeamSplitterParams,
    ) -> Complex64 {
        let c11 = Complex64::from_polar(bs.tau.sqrt(), bs.phi_tau);
        let c12 = -Complex64::from_polar(bs.refl.sqrt(), -bs.phi_rho);
        let c21 = Complex64::from_polar(bs.refl.sqrt(), bs.phi_rho);
        let c22 = Complex64::from_polar(bs.tau.sqrt(), -bs.phi_tau);
        let mut sum = Complex64::default();
        for k in p.saturating_sub(mu)..=nu.min(p) {
            let l = p - k;
            let coeff =
                crate::measure::binomial_coeff(nu, k) * crate::measure::binomial_coeff(mu, l);
            sum += c11.powu(k as u32)
                * c12.powu((nu - k) as u32)
                * c21.powu(l as u32)
                * c22.powu((mu - l) as u32)
                * coeff;
        }
        let norm = ((0.5)
            * (ln_factorial(p) + ln_factorial(nu + mu - p) - ln_factorial(nu) - ln_factorial(mu)))
        .exp();
        sum * norm
    }

    #[test]
    fn matches_operator_expansion_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..10 {
            let tau: f64 = rng.random_range(0.05..0.95);
            let bs = BeamSplitterParams::new(
                tau,
                1.0 - tau,
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
            )
            .unwrap();
            for nu in 0..=8usize {
                for mu in 0..=(8 - nu) {
                    for p in 0..=(nu + mu) {
                        let direct = bs_amplitude(p, nu, mu, &bs).unwrap();
                        let oracle = amplitude_by_operator_expansion(p, nu, mu, &bs);
                        assert!(
                            (direct - oracle).norm() < 1e-12,
                            "A_{p}({nu},{mu}): direct {direct}, oracle {oracle}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn table_agrees_with_direct_evaluation() {
        let bs = BeamSplitterParams::new(0.42, 0.58, 0.9, -0.3).unwrap();
        let table = AmplitudeTable::new(&bs, 10).unwrap();
        for nu in 0..=10usize {
            for mu in 0..=(10 - nu) {
                for p in 0..=(nu + mu) {
                    let direct = bs_amplitude(p, nu, mu, &bs).unwrap();
                    assert_eq!(table.get(p, nu, mu), direct);
                }
            }
        }
        assert_eq!(table.get(5, 9, 9), Complex64::default());
    }
}
