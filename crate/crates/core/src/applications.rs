//! Reduced-state purity, Stokes parameters and photon-number projectors
//! expressed through normally ordered correlations.

use num_complex::Complex64;

use crate::combinatorics::{factorial_f64, multinomial_f64};
use crate::correlations::{correlation_table, expectation, CorrelationIndex};
use crate::fock::{BeamState, OccupationVector};
use crate::removal::subset_of_fixed_n;
use crate::subset::{random_subset, SubsetMethod};
use crate::{Error, Result};

/// Pure-state check tolerance on `|Tr(rho^2) - Tr(rho)^2|`.
pub const PURITY_TOLERANCE: f64 = 1e-10;

fn require_pure(psi: &BeamState) -> Result<()> {
    let t = psi.trace();
    let error = (psi.purity() - t * t).abs();
    if error > PURITY_TOLERANCE {
        return Err(Error::NotPure { error });
    }
    Ok(())
}

fn require_modes(rho: &BeamState, expected: usize) -> Result<()> {
    if rho.modes() != expected {
        return Err(Error::WrongModeCount {
            expected,
            found: rho.modes(),
        });
    }
    Ok(())
}

/// Purity of `Tr_{N-q}(|psi><psi|)` from the order-`(N - q)` correlations:
/// `(q!^2 / N!^2) sum_{k,l} C(N-q; k) C(N-q; l) |<O_kl>|^2`.
pub fn reduced_purity_formula(psi_n: &BeamState, n: u32, q: u32) -> Result<f64> {
    psi_n.require_fixed(n)?;
    require_pure(psi_n)?;
    if q > n {
        return Err(Error::BadSubsetSize {
            q: i64::from(q),
            photons: n,
        });
    }
    let prefactor = factorial_f64(u64::from(q)) / factorial_f64(u64::from(n));
    let sum: f64 = correlation_table(psi_n, n - q)
        .iter()
        .map(|(idx, v)| {
            multinomial_f64(idx.creators.as_slice()) * multinomial_f64(idx.annihilators.as_slice()) * v.norm_sqr()
        })
        .sum();
    Ok(prefactor * prefactor * sum)
}

/// `Tr(sigma^2)` of the reduced state `sigma = Tr_{N-q}(|psi><psi|)`.
pub fn reduced_purity_direct(psi_n: &BeamState, n: u32, q: u32) -> Result<f64> {
    require_pure(psi_n)?;
    if q > n {
        return Err(Error::BadSubsetSize {
            q: i64::from(q),
            photons: n,
        });
    }
    Ok(subset_of_fixed_n(psi_n, n, q)?.purity())
}

/// Stokes parameters of a two-mode beam, in photons.
///
/// `s0 = <n1 + n2>`, `s1 = <n1 - n2>`, `s2 = 2 Re <a1^dagger a2>`,
/// `s3 = 2 Im <a1^dagger a2>`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StokesVector {
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl StokesVector {
    /// `s0^2 + s1^2 + s2^2 + s3^2`
    pub fn norm_sq(&self) -> f64 {
        self.s0 * self.s0 + self.s1 * self.s1 + self.s2 * self.s2 + self.s3 * self.s3
    }

    /// `(s1, s2, s3) / s0`
    pub fn normalized(&self) -> Option<[f64; 3]> {
        (self.s0 > 0.0).then(|| [self.s1 / self.s0, self.s2 / self.s0, self.s3 / self.s0])
    }
}

pub fn stokes(rho: &BeamState) -> Result<StokesVector> {
    require_modes(rho, 2)?;
    let n1 = expectation(rho, &CorrelationIndex::coherence(2, 0, 0)?)?.re;
    let n2 = expectation(rho, &CorrelationIndex::coherence(2, 1, 1)?)?.re;
    let x = expectation(rho, &CorrelationIndex::coherence(2, 0, 1)?)?;
    Ok(StokesVector {
        s0: n1 + n2,
        s1: n1 - n2,
        s2: 2.0 * x.re,
        s3: 2.0 * x.im,
    })
}

/// Bloch vector `(r11 - r22, 2 Re r21, 2 Im r21)` of the state of one photon
/// picked at random from a two-mode beam, with `r21 = <e2| varrho |e1>`.
pub fn bloch_of_random_photon(rho: &BeamState) -> Result<[f64; 3]> {
    require_modes(rho, 2)?;
    let single = random_subset(rho, 1, SubsetMethod::Direct)?;
    let (e1, e2) = (
        OccupationVector::from_vec_unchecked([1, 0].into()),
        OccupationVector::from_vec_unchecked([0, 1].into()),
    );
    let r11 = single.get(&e1, &e1).re;
    let r22 = single.get(&e2, &e2).re;
    let r21: Complex64 = single.get(&e2, &e1);
    Ok([r11 - r22, 2.0 * r21.re, 2.0 * r21.im])
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectorExpectation {
    /// Truncated correlation series.
    pub series: f64,
    /// `<m| rho |m>`
    pub direct: f64,
}

/// `<m><m|>` of a single-mode state as
/// `sum_{n=m}^{N_max} (-1)^{n-m} / (m! (n-m)!) <O_nn>`.
/// The series is exact because `<O_nn>` vanishes above `N_max`.
pub fn projector_expectation_series(rho: &BeamState, m: u32) -> Result<ProjectorExpectation> {
    require_modes(rho, 1)?;
    projector_expectation_product(rho, &OccupationVector::from_vec_unchecked([m].into()))
}

/// Multimode diagonal projector `|m><m|` as the product of single-mode
/// series, `sum_{n >= m} prod_i (-1)^{n_i-m_i} / (m_i! (n_i-m_i)!) <O_nn>`
/// over `|n| <= N_max`.
pub fn projector_expectation_product(rho: &BeamState, m: &OccupationVector) -> Result<ProjectorExpectation> {
    require_modes(rho, m.modes())?;
    let direct = rho.get(m, m).re;
    let n_max = rho.max_photons().unwrap_or(0);
    let mut series = 0.0;
    if m.total() <= n_max {
        for excess in OccupationVector::up_to_total(m.modes(), n_max - m.total()) {
            let n = m.checked_add(&excess)?;
            let mut coeff = 1.0;
            for (&mi, &ei) in m.as_slice().iter().zip(excess.as_slice()) {
                coeff /= factorial_f64(u64::from(mi)) * factorial_f64(u64::from(ei));
                if ei % 2 == 1 {
                    coeff = -coeff;
                }
            }
            series += coeff * expectation(rho, &CorrelationIndex::diagonal(n))?.re;
        }
    }
    Ok(ProjectorExpectation { series, direct })
}
