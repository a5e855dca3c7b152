//! Mode-agnostic removal of photons.
//!
//! For a fixed photon number `N`, discarding one photon is
//! `Tr_1(rho_N) = (1/N) sum_i a_i rho_N a_i^dagger`. For states without a
//! definite photon number the `1/N` becomes `1/sqrt(N^)` on both sides of the
//! state, with `1/sqrt(0) := 0` on the vacuum, so vacuum weight is discarded
//! and the result is left subnormalized.

use num_complex::Complex64;

use crate::fock::{annihilate_term, BeamState, Side, TermAccumulator};
use crate::math;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct RemovalResult {
    pub state: BeamState,
    /// Number of photons removed.
    pub removed: u32,
    /// `Tr(state)`: the input weight of sectors with at least `removed` photons.
    pub trace_retained: f64,
}

impl RemovalResult {
    fn new(state: BeamState, removed: u32) -> Self {
        let trace_retained = state.trace();
        Self {
            state,
            removed,
            trace_retained,
        }
    }

    /// The retained state renormalized to unit trace.
    pub fn normalized(&self) -> Result<BeamState> {
        self.state.normalize()
    }
}

/// `sum_i a_i rho a_i^dagger`
pub(crate) fn sandwich_all_modes(rho: &BeamState) -> BeamState {
    let mut acc = TermAccumulator::new(rho.modes());
    for (key, a) in rho.terms() {
        for mode in 0..rho.modes() {
            if let Some((k, w)) = annihilate_term(key, mode, Side::Both) {
                acc.add(k, a * w);
            }
        }
    }
    acc.finish()
}

/// `(1/N) sum_i a_i rho_N a_i^dagger` for a state supported on the `N`-photon
/// sector. Trace preserving.
pub fn remove_one_fixed_n(rho_n: &BeamState, n: u32) -> Result<BeamState> {
    if n == 0 {
        return Err(Error::EmptyState);
    }
    rho_n.require_fixed(n)?;
    Ok(sandwich_all_modes(rho_n).scaled(1.0 / f64::from(n)))
}

/// `sum_i a_i N^{-1/2} rho N^{-1/2} a_i^dagger`.
pub fn remove_one_general(rho: &BeamState) -> RemovalResult {
    let dressed = rho.number_dressed(math::inv_sqrt_or_zero, math::inv_sqrt_or_zero);
    let out = sandwich_all_modes(&dressed);
    debug_assert!(
        {
            let other = remove_one_general_shifted(rho);
            let scale = rho.terms().map(|(_, a)| a.norm_sqr()).fold(1.0, f64::max);
            out.max_abs_diff(&other) <= 1e-13 * math::sqrt(scale)
        },
        "the two operator orderings of single-photon removal disagree"
    );
    RemovalResult::new(out, 1)
}

/// The equivalent ordering `sum_i (N+1)^{-1/2} a_i rho a_i^dagger (N+1)^{-1/2}`.
pub fn remove_one_general_shifted(rho: &BeamState) -> BeamState {
    let mut acc = TermAccumulator::new(rho.modes());
    for (key, a) in rho.terms() {
        for mode in 0..rho.modes() {
            if let Some((k, w)) = annihilate_term(key, mode, Side::Both) {
                // (N+1)^{-1/2} evaluated on the lowered ket and bra
                let norm = math::inv_sqrt_or_zero(k.ket.total() + 1) * math::inv_sqrt_or_zero(k.bra.total() + 1);
                acc.add(k, a * Complex64::new(w * norm, 0.0));
            }
        }
    }
    acc.finish()
}

/// Removes `k` photons by iterating [`remove_one_general`]; `k = 0` is the
/// identity.
pub fn remove_k(rho: &BeamState, k: u32) -> RemovalResult {
    let mut state = rho.clone();
    for _ in 0..k {
        state = remove_one_general(&state).state;
    }
    RemovalResult::new(state, k)
}

/// `Tr_{N-q}(rho_N)`: the state of `q` photons kept from an `N`-photon state.
pub fn subset_of_fixed_n(rho_n: &BeamState, n: u32, q: u32) -> Result<BeamState> {
    if q > n {
        return Err(Error::BadSubsetSize {
            q: i64::from(q),
            photons: n,
        });
    }
    rho_n.require_fixed(n)?;
    let mut state = rho_n.clone();
    for photons in ((q + 1)..=n).rev() {
        state = remove_one_fixed_n(&state, photons)?;
    }
    Ok(state)
}
