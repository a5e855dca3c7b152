//! The state of `q` photons selected at random from a beam.
//!
//! A `q`-photon subset comes from the `N`-photon sector with probability
//! `P(q from N) = p_N C(N, q) / N(q)`, where `N(q) = sum_N p_N C(N, q)` is the
//! expected number of `q`-photon events. The subset state
//! `varrho(q|rho) = sum_N P(q from N) Tr_{N-q}(rho_N)` is available by that
//! convex combination and, independently, directly from the order-`q`
//! correlations of `rho`:
//!
//! ```text
//! varrho(q|rho) = (1/N(q)) sum_{|m|=|n|=q} <O_nm>_rho / sqrt(m! n!) |m><n|
//! ```
//!
//! where `O_nm` creates `n` and annihilates `m`. With this orientation the
//! result is Hermitian whenever `rho` is.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::combinatorics::{binomial_f64, to_f64};
use crate::correlations::{correlation_table, expectation, CorrelationIndex};
use crate::fock::{BeamState, KetBra, OccupationVector, SectorDecomposition, TermAccumulator};
use crate::math;
use crate::removal::{remove_k, subset_of_fixed_n};
use crate::{Error, Result, PRUNE_EPSILON};

/// Which construction of `varrho(q|rho)` to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SubsetMethod {
    /// Assemble from order-`q` correlations.
    #[default]
    Direct,
    /// Reduce every photon-number sector and mix.
    Convex,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubsetWeights {
    pub q: u32,
    /// `N -> P(q from N)` for every sector present in the state.
    pub weights: BTreeMap<u32, f64>,
    /// `N(q) = sum_N p_N C(N, q)`
    pub normalization: f64,
    /// `N(q) = sum_{|m|=q} <O_mm> / prod_i m_i!`, computed from correlations.
    pub normalization_from_correlations: f64,
}

/// `sum_{|m|=q} <O_mm> / m!`
fn normalization_from_correlations(rho: &BeamState, q: u32) -> Result<f64> {
    let mut total = 0.0;
    for m in OccupationVector::with_total(rho.modes(), q) {
        let moment = expectation(rho, &CorrelationIndex::diagonal(m.clone()))?;
        total += moment.re / to_f64(&m.factorial_product());
    }
    Ok(total)
}

pub fn subset_weights(decomp: &SectorDecomposition, q: u32) -> Result<SubsetWeights> {
    let raw: BTreeMap<u32, f64> = decomp
        .sectors
        .iter()
        .map(|(&n, s)| (n, s.probability * binomial_f64(u64::from(n), i64::from(q))))
        .collect();
    let normalization: f64 = raw.values().sum();
    if normalization <= PRUNE_EPSILON {
        return Err(Error::DegenerateNormalization { q });
    }
    let weights = raw.into_iter().map(|(n, w)| (n, w / normalization)).collect();
    let from_corr = normalization_from_correlations(&decomp.reassemble(), q)?;
    debug_assert!(
        (from_corr - normalization).abs() <= 1e-10 * normalization.max(1.0),
        "N({q}) from sectors {normalization} and from correlations {from_corr} disagree"
    );
    Ok(SubsetWeights {
        q,
        weights,
        normalization,
        normalization_from_correlations: from_corr,
    })
}

/// `varrho(q|rho)` using the requested construction.
pub fn random_subset(rho: &BeamState, q: u32, method: SubsetMethod) -> Result<BeamState> {
    match method {
        SubsetMethod::Direct => random_subset_state_direct(rho, q),
        SubsetMethod::Convex => random_subset_state(rho, q),
    }
}

/// `varrho(q|rho)` as `sum_N P(q from N) Tr_{N-q}(rho_N)`.
pub fn random_subset_state(rho: &BeamState, q: u32) -> Result<BeamState> {
    let decomp = rho.sector_decompose()?;
    let weights = subset_weights(&decomp, q)?;
    let mut acc = TermAccumulator::new(rho.modes());
    for (&n, sector) in decomp.sectors.range(q..) {
        let w = weights.weights[&n];
        if w == 0.0 {
            continue;
        }
        let reduced = subset_of_fixed_n(&sector.state, n, q)?;
        acc.add_state(&reduced, Complex64::new(w, 0.0));
    }
    Ok(acc.finish())
}

/// `varrho(q|rho)` assembled entrywise from order-`q` correlations.
pub fn random_subset_state_direct(rho: &BeamState, q: u32) -> Result<BeamState> {
    if rho.max_photons().is_none_or(|n| q > n) {
        return Err(Error::DegenerateNormalization { q });
    }
    let table = correlation_table(rho, q);
    let normalization: f64 = table
        .iter()
        .filter(|(idx, _)| idx.creators == idx.annihilators)
        .map(|(idx, v)| v.re / to_f64(&idx.creators.factorial_product()))
        .sum();
    if normalization <= PRUNE_EPSILON {
        return Err(Error::DegenerateNormalization { q });
    }
    let mut acc = TermAccumulator::new(rho.modes());
    for (idx, v) in table {
        // <O_nm> with n = creators, m = annihilators fills |m><n|.
        let denom = math::sqrt(to_f64(
            &(idx.creators.factorial_product() * idx.annihilators.factorial_product()),
        ));
        let key = KetBra::new(idx.annihilators, idx.creators);
        acc.add(key, v / (normalization * denom));
    }
    Ok(acc.finish())
}

/// `<O_kl>` directly and as `N(|l|) <O_kl>_{varrho(|l| | rho)}`, returned as
/// `(direct, via_subset)`.
pub fn reconstruct_expectation(rho: &BeamState, idx: &CorrelationIndex) -> Result<(Complex64, Complex64)> {
    idx.require_balanced()?;
    let q = idx.annihilators.total();
    let direct = expectation(rho, idx)?;
    let weights = subset_weights(&rho.sector_decompose()?, q)?;
    let subset = random_subset_state(rho, q)?;
    let via_subset = expectation(&subset, idx)? * weights.normalization;
    Ok((direct, via_subset))
}

/// [`reconstruct_expectation`] for every balanced index of order `q`, as
/// `(index, direct, via_subset)`.
pub fn reconstruct_order(rho: &BeamState, q: u32) -> Result<Vec<(CorrelationIndex, Complex64, Complex64)>> {
    let weights = subset_weights(&rho.sector_decompose()?, q)?;
    let subset = random_subset_state(rho, q)?;
    let via = correlation_table(&subset, q);
    Ok(correlation_table(rho, q)
        .into_iter()
        .map(|(idx, direct)| {
            let v = via[&idx] * weights.normalization;
            (idx, direct, v)
        })
        .collect())
}

/// Evaluates the reinterpretation of `<O_kl>` through `q`-photon subsets,
/// `N(q) sum_N P(q from N) <O_kl>_{varrho(q|rho_N)}`, against the true value.
/// Returns `(claimed, actual)`; they agree for every state only at `q = |l|`.
pub fn uniqueness_counterexample(rho: &BeamState, idx: &CorrelationIndex, q: u32) -> Result<(Complex64, Complex64)> {
    idx.require_balanced()?;
    let l = idx.annihilators.total();
    if q < l {
        return Err(Error::BadSubsetSize {
            q: i64::from(q),
            photons: l,
        });
    }
    let decomp = rho.sector_decompose()?;
    let mut claimed = Complex64::default();
    for (&n, sector) in decomp.sectors.range(q..) {
        // N(q) P(q from N) = p_N C(N, q)
        let weight = sector.probability * binomial_f64(u64::from(n), i64::from(q));
        let reduced = subset_of_fixed_n(&sector.state, n, q)?;
        claimed += expectation(&reduced, idx)? * weight;
    }
    Ok((claimed, expectation(rho, idx)?))
}

/// `<O_kl>` directly, and rebuilt from every term `rho_mn |m><n|` as
/// `rho_mn sqrt(C(|m|,|l|) C(|n|,|k|)) <O_kl>_{Tr_{|m|-|l|}(|m><n|)}`.
/// Returns `(lhs, rhs)`.
pub fn mixed_sector_equivalence(rho: &BeamState, idx: &CorrelationIndex) -> Result<(Complex64, Complex64)> {
    let lhs = expectation(rho, idx)?;
    let (k, l) = (idx.creators.total(), idx.annihilators.total());
    let mut rhs = Complex64::default();
    for (key, a) in rho.terms() {
        let (m, n) = (key.ket.total(), key.bra.total());
        if m < l || n < k || m - l != n - k {
            continue;
        }
        let weight = math::sqrt(binomial_f64(u64::from(m), i64::from(l)) * binomial_f64(u64::from(n), i64::from(k)));
        let single = BeamState::ket_bra(key.ket.clone(), key.bra.clone(), Complex64::new(1.0, 0.0))?;
        let reduced = remove_k(&single, m - l).state;
        rhs += a * weight * expectation(&reduced, idx)?;
    }
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::test_support::*;

    const H: f64 = core::f64::consts::FRAC_1_SQRT_2;

    fn idx(k: &[u32], l: &[u32]) -> CorrelationIndex {
        CorrelationIndex::from_slices(k, l).unwrap()
    }

    #[test]
    fn weights_example() {
        let rho = terms(2, &[(&[1, 0], &[1, 0], c(0.5)), (&[2, 0], &[2, 0], c(0.5))]);
        let w = subset_weights(&rho.sector_decompose().unwrap(), 1).unwrap();
        assert!((w.normalization - 1.5).abs() < 1e-15);
        assert!((w.normalization_from_correlations - 1.5).abs() < 1e-15);
        assert!((w.weights[&1] - 1.0 / 3.0).abs() < 1e-15);
        assert!((w.weights[&2] - 2.0 / 3.0).abs() < 1e-15);
        // N(1) = <N>
        let mean = expectation(&rho, &idx(&[1, 0], &[1, 0])).unwrap().re;
        assert!((w.normalization - mean).abs() < 1e-15);
    }

    #[test]
    fn weights_below_q_are_zero() {
        let rho = terms(1, &[(&[1], &[1], c(0.5)), (&[3], &[3], c(0.5))]);
        let w = subset_weights(&rho.sector_decompose().unwrap(), 2).unwrap();
        assert_eq!(w.weights[&1], 0.0);
        assert!((w.weights[&3] - 1.0).abs() < 1e-15);
        let fixed = fock(&[2, 1]);
        let w = subset_weights(&fixed.sector_decompose().unwrap(), 2).unwrap();
        assert_eq!(w.weights.len(), 1);
        assert!((w.weights[&3] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_normalization() {
        let rho = fock(&[1, 1]);
        assert_eq!(
            subset_weights(&rho.sector_decompose().unwrap(), 3),
            Err(Error::DegenerateNormalization { q: 3 })
        );
        assert_eq!(
            random_subset_state(&rho, 3),
            Err(Error::DegenerateNormalization { q: 3 })
        );
        assert_eq!(
            random_subset_state_direct(&rho, 3),
            Err(Error::DegenerateNormalization { q: 3 })
        );
    }

    #[test]
    fn subset_state_examples() {
        let rho = terms(2, &[(&[1, 0], &[1, 0], c(0.5)), (&[2, 0], &[2, 0], c(0.5))]);
        for method in [SubsetMethod::Convex, SubsetMethod::Direct] {
            let s = random_subset(&rho, 1, method).unwrap();
            assert!(s.max_abs_diff(&fock(&[1, 0])) < 1e-15, "{method:?}");
            let s = random_subset(&fock(&[1, 1]), 1, method).unwrap();
            let half = terms(2, &[(&[1, 0], &[1, 0], c(0.5)), (&[0, 1], &[0, 1], c(0.5))]);
            assert!(s.max_abs_diff(&half) < 1e-15);
        }
        let mut rng = Lcg(1);
        let only_two = random_mixed(2, &OccupationVector::with_total(2, 2), 2, &mut rng);
        for method in [SubsetMethod::Convex, SubsetMethod::Direct] {
            assert!(random_subset(&only_two, 2, method).unwrap().max_abs_diff(&only_two) < 1e-14);
        }
    }

    #[test]
    fn diagonal_coefficient_is_scaled_moment() {
        let mut rng = Lcg(6);
        let rho = random_mixed(2, &OccupationVector::up_to_total(2, 4), 3, &mut rng);
        let q = 2;
        let s = random_subset_state_direct(&rho, q).unwrap();
        let norm = subset_weights(&rho.sector_decompose().unwrap(), q)
            .unwrap()
            .normalization;
        for m in OccupationVector::with_total(2, q) {
            let moment = expectation(&rho, &CorrelationIndex::diagonal(m.clone())).unwrap();
            let expect = moment / (norm * to_f64(&m.factorial_product()));
            assert!((s.get(&m, &m) - expect).norm() < 1e-13);
        }
    }

    #[test]
    fn one_photon_subset_is_coherence_matrix() {
        let mut rng = Lcg(19);
        let rho = random_mixed(2, &OccupationVector::up_to_total(2, 3), 2, &mut rng);
        let s = random_subset_state_direct(&rho, 1).unwrap();
        let mean = expectation(&rho, &idx(&[1, 0], &[1, 0])).unwrap().re
            + expectation(&rho, &idx(&[0, 1], &[0, 1])).unwrap().re;
        for i in 0..2 {
            for j in 0..2 {
                let ei = OccupationVector::single_mode(2, i, 1).unwrap();
                let ej = OccupationVector::single_mode(2, j, 1).unwrap();
                // <e_i| varrho |e_j> = <a_j^dagger a_i> / <N>
                let coh = expectation(&rho, &CorrelationIndex::coherence(2, j, i).unwrap()).unwrap();
                assert!((s.get(&ei, &ej) - coh / mean).norm() < 1e-14);
            }
        }
        assert!(s.hermitian_error() < 1e-15);
    }

    #[test]
    fn paths_agree_on_coherent_superpositions() {
        let mut rng = Lcg(27);
        for d in 1..=3 {
            let rho = random_mixed(d, &OccupationVector::up_to_total(d, 4), 2, &mut rng);
            for q in 1..=4 {
                let a = random_subset_state(&rho, q).unwrap();
                let b = random_subset_state_direct(&rho, q).unwrap();
                assert!(a.max_abs_diff(&b) < 1e-12, "d={d} q={q}");
                assert!((a.trace() - 1.0).abs() < 1e-12);
                assert!(a.is_fixed(q));
            }
        }
    }

    #[test]
    fn cross_sector_terms_do_not_matter() {
        let mut rng = Lcg(31);
        let basis = OccupationVector::up_to_total(2, 3);
        let rho = random_mixed(2, &basis, 2, &mut rng);
        let mut block_diag = BeamState::zero(2).unwrap();
        for n in 0..=3 {
            block_diag = block_diag.plus(&rho.sector(n)).unwrap();
        }
        for q in 1..=3 {
            let a = random_subset_state_direct(&rho, q).unwrap();
            let b = random_subset_state_direct(&block_diag, q).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-12);
        }
    }

    #[test]
    fn reconstruction_examples() {
        let rho = terms(2, &[(&[1, 0], &[1, 0], c(0.5)), (&[2, 0], &[2, 0], c(0.5))]);
        let (direct, via) = reconstruct_expectation(&rho, &idx(&[1, 0], &[1, 0])).unwrap();
        assert!((direct - c(1.5)).norm() < 1e-15);
        assert!((via - c(1.5)).norm() < 1e-15);
        assert!(matches!(
            reconstruct_expectation(&rho, &idx(&[1, 0], &[0, 0])),
            Err(Error::UnbalancedIndex { .. })
        ));
        let mut rng = Lcg(8);
        let fixed = random_mixed(2, &OccupationVector::with_total(2, 3), 2, &mut rng);
        for ix in CorrelationIndex::balanced(2, 2) {
            let (d, v) = reconstruct_expectation(&fixed, &ix).unwrap();
            assert!((d - v).norm() < 1e-12);
        }
        let mixed = random_mixed(2, &OccupationVector::up_to_total(2, 3), 2, &mut rng);
        for q in 0..=3 {
            for (ix, d, v) in reconstruct_order(&mixed, q).unwrap() {
                let (d1, v1) = reconstruct_expectation(&mixed, &ix).unwrap();
                assert!((d - d1).norm() < 1e-14 && (v - v1).norm() < 1e-12);
                assert!((d - v).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn uniqueness_examples() {
        let rho = terms(1, &[(&[1], &[1], c(0.5)), (&[3], &[3], c(0.5))]);
        let n = idx(&[1], &[1]);
        let (claimed, actual) = uniqueness_counterexample(&rho, &n, 2).unwrap();
        assert!((claimed - c(3.0)).norm() < 1e-14);
        assert!((actual - c(2.0)).norm() < 1e-14);
        let (claimed, actual) = uniqueness_counterexample(&rho, &n, 1).unwrap();
        assert!((claimed - actual).norm() < 1e-14);
        // One sector: the binomial factor is a constant and q = N matches too.
        let fixed = fock(&[2, 1]);
        let ix = idx(&[1, 0], &[1, 0]);
        let (claimed, actual) = uniqueness_counterexample(&fixed, &ix, 3).unwrap();
        assert!((claimed - actual).norm() < 1e-14);
    }

    #[test]
    fn mixed_sector_examples() {
        let plus = pure(1, &[(&[0], c(H)), (&[1], c(H))]);
        let (lhs, rhs) = mixed_sector_equivalence(&plus, &idx(&[0], &[1])).unwrap();
        assert!((lhs - c(0.5)).norm() < 1e-15 && (rhs - c(0.5)).norm() < 1e-15);

        let block = terms(1, &[(&[1], &[1], c(0.5)), (&[2], &[2], c(0.5))]);
        let (lhs, rhs) = mixed_sector_equivalence(&block, &idx(&[0], &[1])).unwrap();
        assert_eq!((lhs, rhs), (c(0.0), c(0.0)));

        let sup = pure(1, &[(&[1], c(H)), (&[2], c(H))]);
        let (lhs, rhs) = mixed_sector_equivalence(&sup, &idx(&[1], &[2])).unwrap();
        // single contributing term m=2, n=1: 0.5 * <1|a^dagger a^2|2> = 0.5 * sqrt(2)
        assert!((lhs - c(0.5 * libm::sqrt(2.0))).norm() < 1e-15);
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn mixed_sector_equivalence_on_random_states() {
        let mut rng = Lcg(55);
        let rho = random_mixed(2, &OccupationVector::up_to_total(2, 4), 2, &mut rng);
        for ko in 0..=3 {
            for lo in 0..=3 {
                for k in OccupationVector::with_total(2, ko) {
                    for l in OccupationVector::with_total(2, lo) {
                        let ix = CorrelationIndex::new(k.clone(), l).unwrap();
                        let (lhs, rhs) = mixed_sector_equivalence(&rho, &ix).unwrap();
                        assert!((lhs - rhs).norm() < 1e-12, "{ix:?}");
                    }
                }
            }
        }
    }
}
