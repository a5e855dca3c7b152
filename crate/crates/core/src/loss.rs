//! Uniform beam-splitter loss.
//!
//! Every mode passes a beam splitter of transmission `eta` whose other port
//! starts in vacuum and is discarded. Three equivalent evaluations:
//!
//! - [`loss_kraus`]: per-mode Kraus operators
//!   `K_j = (1/sqrt(j!)) ((1 - eta)/eta)^{j/2} a^j sqrt(eta)^{a^dagger a}`,
//! - [`loss_fixed_n_decomposition`]: for `N` photons, a binomial mixture
//!   `sum_k C(N, k) (1 - eta)^k eta^{N-k} Tr_k(rho_N)` of photon removals,
//! - [`loss_general_decomposition`]: for any state,
//!   `sum_k ((1 - eta)/eta)^k / k! D^k(sqrt(eta)^N rho sqrt(eta)^N)` with
//!   `D(s) = Tr_1(sqrt(N) s sqrt(N))`.

use num_complex::Complex64;

use crate::combinatorics::binomial_f64;
use crate::fock::{BeamState, KetBra, TermAccumulator};
use crate::linear_optics::{apply_unitary, ModeUnitary};
use crate::math;
use crate::removal::{remove_one_general, subset_of_fixed_n};
use crate::{Error, Result};

/// Smallest transmission accepted by the decomposition paths.
pub const MIN_DECOMPOSITION_ETA: f64 = 1e-6;

/// Transmission `eta` in `[0, 1]`, shared by all modes.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Transmission(f64);

impl Transmission {
    pub fn new(eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::BadEta(eta));
        }
        Ok(Self(eta))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    fn for_decomposition(self) -> Result<f64> {
        if self.0 < MIN_DECOMPOSITION_ETA {
            return Err(Error::BadEta(self.0));
        }
        Ok(self.0)
    }
}

/// `<m - j| K_j |m> = sqrt(C(m, j)) eta^{(m-j)/2} (1 - eta)^{j/2}`; finite at
/// `eta = 0`.
fn kraus_element(m: u32, j: u32, sqrt_eta: f64, sqrt_loss: f64) -> f64 {
    math::sqrt(binomial_f64(u64::from(m), i64::from(j))) * math::powi(sqrt_eta, m - j) * math::powi(sqrt_loss, j)
}

/// Applies the Kraus family mode by mode. Trace preserving; `eta = 0` sends
/// everything to the vacuum.
pub fn loss_kraus(rho: &BeamState, eta: Transmission) -> BeamState {
    let sqrt_eta = math::sqrt(eta.0);
    let sqrt_loss = math::sqrt(1.0 - eta.0);
    let mut state = rho.clone();
    for mode in 0..rho.modes() {
        let mut acc = TermAccumulator::new(rho.modes());
        for (key, a) in state.terms() {
            let (m, n) = (key.ket.get(mode), key.bra.get(mode));
            for j in 0..=m.min(n) {
                let w = kraus_element(m, j, sqrt_eta, sqrt_loss) * kraus_element(n, j, sqrt_eta, sqrt_loss);
                if w == 0.0 {
                    continue;
                }
                let mut ket = key.ket.as_slice().to_vec();
                let mut bra = key.bra.as_slice().to_vec();
                ket[mode] -= j;
                bra[mode] -= j;
                let key = KetBra::new(
                    crate::OccupationVector::from_vec_unchecked(ket),
                    crate::OccupationVector::from_vec_unchecked(bra),
                );
                acc.add(key, a * w);
            }
        }
        state = acc.finish();
    }
    state
}

/// `sum_k C(N, k) (1 - eta)^k eta^{N-k} Tr_k(rho_N)` for an `N`-photon state.
pub fn loss_fixed_n_decomposition(rho_n: &BeamState, n: u32, eta: Transmission) -> Result<BeamState> {
    rho_n.require_fixed(n)?;
    let eta = eta.0;
    let mut acc = TermAccumulator::new(rho_n.modes());
    for lost in 0..=n {
        let weight =
            binomial_f64(u64::from(n), i64::from(lost)) * math::powi(1.0 - eta, lost) * math::powi(eta, n - lost);
        if weight == 0.0 {
            continue;
        }
        let reduced = subset_of_fixed_n(rho_n, n, n - lost)?;
        acc.add_state(&reduced, Complex64::new(weight, 0.0));
    }
    Ok(acc.finish())
}

/// Loss of an arbitrary state as a series of dressed photon removals.
///
/// The `((1 - eta)/eta)^k` prefactor is folded into the `sqrt(eta)^N`
/// dressing term by term: a term that had `k` photons removed from both sides
/// carries `(1 - eta)^k eta^{(|m| + |n|)/2}` in terms of its final totals, so
/// nothing diverges as `eta` becomes small.
pub fn loss_general_decomposition(rho: &BeamState, eta: Transmission) -> Result<BeamState> {
    let eta = eta.for_decomposition()?;
    let sqrt_eta = math::sqrt(eta);
    let dress = |n: u32| math::powi(sqrt_eta, n);
    let sqrt_n = |n: u32| math::sqrt(f64::from(n));

    let mut acc = TermAccumulator::new(rho.modes());
    // D^k(rho) / k!
    let mut removed = rho.clone();
    let mut k = 0u32;
    while !removed.is_empty() {
        let weight = math::powi(1.0 - eta, k);
        acc.add_state(&removed.number_dressed(dress, dress), Complex64::new(weight, 0.0));
        k += 1;
        let next = remove_one_general(&removed.number_dressed(sqrt_n, sqrt_n)).state;
        removed = next.scaled(1.0 / f64::from(k));
    }
    Ok(acc.finish())
}

/// `(loss(U rho U^dagger), U loss(rho) U^dagger)`.
pub fn loss_commutes_with_network(
    rho: &BeamState,
    eta: Transmission,
    u: &ModeUnitary,
) -> Result<(BeamState, BeamState)> {
    let after = loss_kraus(&apply_unitary(rho, u)?, eta);
    let before = apply_unitary(&loss_kraus(rho, eta), u)?;
    Ok((after, before))
}
