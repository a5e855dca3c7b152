//! Normally ordered correlations
//! `O_kl = a_1^dagger^{k_1} ... a_d^dagger^{k_d} a_1^{l_1} ... a_d^{l_d}`
//! and how they change when photons are removed.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::combinatorics::sqrt_falling_product;
use crate::fock::{BeamState, KetBra, OccupationVector};
use crate::math;
use crate::removal::{remove_one_fixed_n, remove_one_general};
use crate::{Error, Result};

/// Labels the monomial `O_kl`: `creators` is `k`, `annihilators` is `l`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CorrelationIndex {
    pub creators: OccupationVector,
    pub annihilators: OccupationVector,
}

impl CorrelationIndex {
    pub fn new(creators: OccupationVector, annihilators: OccupationVector) -> Result<Self> {
        if creators.modes() != annihilators.modes() {
            return Err(Error::ModeMismatch {
                expected: creators.modes(),
                found: annihilators.modes(),
            });
        }
        Ok(Self { creators, annihilators })
    }

    pub fn from_slices(creators: &[u32], annihilators: &[u32]) -> Result<Self> {
        Self::new(
            OccupationVector::from_slice(creators)?,
            OccupationVector::from_slice(annihilators)?,
        )
    }

    /// `a_i^dagger a_j`
    pub fn coherence(modes: usize, i: usize, j: usize) -> Result<Self> {
        Self::new(
            OccupationVector::single_mode(modes, i, 1)?,
            OccupationVector::single_mode(modes, j, 1)?,
        )
    }

    /// `O_mm`: a diagonal (intensity) moment.
    pub fn diagonal(m: OccupationVector) -> Self {
        Self {
            creators: m.clone(),
            annihilators: m,
        }
    }

    pub fn modes(&self) -> usize {
        self.creators.modes()
    }

    pub fn is_balanced(&self) -> bool {
        self.creators.total() == self.annihilators.total()
    }

    /// `(k, l) -> (l, k)`: the index of `O_kl^dagger`.
    pub fn adjoint(&self) -> Self {
        Self {
            creators: self.annihilators.clone(),
            annihilators: self.creators.clone(),
        }
    }

    pub fn require_balanced(&self) -> Result<()> {
        if self.is_balanced() {
            Ok(())
        } else {
            Err(Error::UnbalancedIndex {
                creators: self.creators.total(),
                annihilators: self.annihilators.total(),
            })
        }
    }

    /// Every balanced index with `|k| = |l| = order`.
    pub fn balanced(modes: usize, order: u32) -> Vec<Self> {
        let patterns = OccupationVector::with_total(modes, order);
        patterns
            .iter()
            .flat_map(|k| {
                patterns.iter().map(move |l| Self {
                    creators: k.clone(),
                    annihilators: l.clone(),
                })
            })
            .collect()
    }
}

/// `<n| O_kl |m>`, the weight with which the term `|m><n|` enters `Tr(O_kl rho)`.
///
/// Non-zero only when `m - l = n - k >= 0` componentwise.
pub(crate) fn ladder_element(idx: &CorrelationIndex, ket: &OccupationVector, bra: &OccupationVector) -> Option<f64> {
    let rest_ket = ket.checked_sub(&idx.annihilators)?;
    let rest_bra = bra.checked_sub(&idx.creators)?;
    if rest_ket != rest_bra {
        return None;
    }
    let pairs = ket
        .as_slice()
        .iter()
        .zip(idx.annihilators.as_slice())
        .chain(bra.as_slice().iter().zip(idx.creators.as_slice()))
        .map(|(&n, &k)| (n, k));
    Some(sqrt_falling_product(pairs))
}

/// `Tr(O_kl rho)`.
///
/// Scans the stored terms, or, when that is cheaper, looks up only the terms
/// `|l + r><k + r|` that can contribute.
pub fn expectation(rho: &BeamState, idx: &CorrelationIndex) -> Result<Complex64> {
    if idx.modes() != rho.modes() {
        return Err(Error::ModeMismatch {
            expected: rho.modes(),
            found: idx.modes(),
        });
    }
    let Some(max) = rho.max_photons() else {
        return Ok(Complex64::default());
    };
    let l = idx.annihilators.total();
    if l > max || idx.creators.total() > max {
        return Ok(Complex64::default());
    }
    let shifts = shift_count(rho.modes(), max - l);
    let mut sum = Complex64::default();
    if shifts < rho.len() {
        for r in OccupationVector::up_to_total(rho.modes(), max - l) {
            let (Ok(m), Ok(n)) = (idx.annihilators.checked_add(&r), idx.creators.checked_add(&r)) else {
                continue;
            };
            let key = KetBra::new(m, n);
            let a = rho.get_key(&key);
            if a != Complex64::default() {
                if let Some(w) = ladder_element(idx, &key.ket, &key.bra) {
                    sum += a * w;
                }
            }
        }
    } else {
        for (key, a) in rho.terms() {
            if let Some(w) = ladder_element(idx, &key.ket, &key.bra) {
                sum += a * w;
            }
        }
    }
    Ok(sum)
}

/// Number of occupation vectors of `modes` modes with total at most `max`,
/// saturating.
fn shift_count(modes: usize, max: u32) -> usize {
    // C(max + modes, modes)
    let mut acc: u128 = 1;
    for i in 1..=modes as u128 {
        acc = acc * (u128::from(max) + i) / i;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// Every balanced order-`order` correlation, computed in a single pass over
/// the state's terms. Indices that vanish are present with value zero.
pub fn correlation_table(rho: &BeamState, order: u32) -> BTreeMap<CorrelationIndex, Complex64> {
    let mut table: BTreeMap<CorrelationIndex, Complex64> = CorrelationIndex::balanced(rho.modes(), order)
        .into_iter()
        .map(|idx| (idx, Complex64::default()))
        .collect();
    for (key, a) in rho.terms() {
        let (m, n) = (&key.ket, &key.bra);
        if m.total() != n.total() || m.total() < order {
            continue;
        }
        for l in m.dominated_with_total(order) {
            let Some(rest) = m.checked_sub(&l) else { continue };
            let Some(k) = n.checked_sub(&rest) else { continue };
            let idx = CorrelationIndex {
                creators: k,
                annihilators: l,
            };
            if let Some(w) = ladder_element(&idx, m, n) {
                if let Some(slot) = table.get_mut(&idx) {
                    *slot += a * w;
                }
            }
        }
    }
    table
}

/// Compares `<O_kl>` after removing one photon from an `N`-photon state with
/// `(N - |l|)/N <O_kl>` before. Returns `(lhs, rhs)`.
pub fn scaling_check_fixed_n(rho_n: &BeamState, n: u32, idx: &CorrelationIndex) -> Result<(Complex64, Complex64)> {
    idx.require_balanced()?;
    rho_n.require_fixed(n)?;
    let reduced = remove_one_fixed_n(rho_n, n)?;
    let lhs = expectation(&reduced, idx)?;
    let factor = (f64::from(n) - f64::from(idx.annihilators.total())) / f64::from(n);
    let rhs = expectation(rho_n, idx)? * factor;
    Ok((lhs, rhs))
}

/// The ways of evaluating `<O_kl>` after a single-photon removal from an
/// arbitrary state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RemovalScaling {
    /// `<O_kl>` on the removed state.
    pub lhs: Complex64,
    /// Contributions of the original terms `|m><n|`, each scaled by
    /// `(|m| - |l|)/sqrt(|m||n|)`.
    pub rhs: Complex64,
    /// `Tr(O (N - |l|)/sqrt(N) rho 1/sqrt(N))`
    pub left_weighted: Complex64,
    /// `Tr(O 1/sqrt(N) rho (N - |k|)/sqrt(N))`
    pub right_weighted: Complex64,
    /// `Tr(O sqrt((N - |l|)/N) rho sqrt((N - |k|)/N))`
    pub split: Complex64,
}

impl RemovalScaling {
    /// Largest distance of any form from `lhs`.
    pub fn max_deviation(&self) -> f64 {
        [self.rhs, self.left_weighted, self.right_weighted, self.split]
            .iter()
            .map(|v| math::sqrt((v - self.lhs).norm_sqr()))
            .fold(0.0, f64::max)
    }
}

/// Evaluates every form of `<O_kl>_{Tr_1(rho)}`; `1/sqrt(N)` is zero on the
/// vacuum throughout.
pub fn scaling_general(rho: &BeamState, idx: &CorrelationIndex) -> Result<RemovalScaling> {
    Ok(scaling_general_many(rho, core::slice::from_ref(idx))?.remove(0))
}

/// [`scaling_general`] for many indices, sharing the removed and dressed
/// states between them.
pub fn scaling_general_many(rho: &BeamState, indices: &[CorrelationIndex]) -> Result<Vec<RemovalScaling>> {
    let removed = remove_one_general(rho).state;
    let n_max = rho.max_photons().unwrap_or(0);
    let inv = math::inv_sqrt_or_zero;
    let mut dressed: BTreeMap<(u32, u32), [BeamState; 3]> = BTreeMap::new();
    let mut out = Vec::with_capacity(indices.len());
    for idx in indices {
        let (kt, lt) = (idx.creators.total(), idx.annihilators.total());
        let (k, l) = (f64::from(kt), f64::from(lt));
        let [left, right, split] = dressed.entry((kt, lt)).or_insert_with(|| {
            [
                rho.number_dressed(|m| (f64::from(m) - l) * inv(m), inv),
                rho.number_dressed(inv, |n| (f64::from(n) - k) * inv(n)),
                rho.number_dressed(
                    |m| {
                        if m == 0 {
                            0.0
                        } else {
                            math::sqrt(((f64::from(m) - l) / f64::from(m)).max(0.0))
                        }
                    },
                    |n| {
                        if n == 0 {
                            0.0
                        } else {
                            math::sqrt(((f64::from(n) - k) / f64::from(n)).max(0.0))
                        }
                    },
                ),
            ]
        });

        // terms |l + r><k + r| are the only ones O_kl sees
        let mut rhs = Complex64::default();
        if idx.modes() != rho.modes() {
            return Err(Error::ModeMismatch {
                expected: rho.modes(),
                found: idx.modes(),
            });
        }
        if kt.max(lt) <= n_max {
            for r in OccupationVector::up_to_total(rho.modes(), n_max - kt.max(lt)) {
                let key = KetBra::new(idx.annihilators.checked_add(&r)?, idx.creators.checked_add(&r)?);
                let a = rho.get_key(&key);
                if a == Complex64::default() {
                    continue;
                }
                if let Some(w) = ladder_element(idx, &key.ket, &key.bra) {
                    let (m, n) = (key.ket.total(), key.bra.total());
                    rhs += a * (w * (f64::from(m) - l) * inv(m * n));
                }
            }
        }
        out.push(RemovalScaling {
            lhs: expectation(&removed, idx)?,
            rhs,
            left_weighted: expectation(left, idx)?,
            right_weighted: expectation(right, idx)?,
            split: expectation(split, idx)?,
        });
    }
    Ok(out)
}

/// `<a_i^dagger a_j^dagger a_j a_i> / (<a_i^dagger a_i> <a_j^dagger a_j>)`
pub fn g2(rho: &BeamState, i: usize, j: usize) -> Result<f64> {
    let modes = rho.modes();
    let ni = expectation(rho, &CorrelationIndex::coherence(modes, i, i)?)?.re;
    let nj = expectation(rho, &CorrelationIndex::coherence(modes, j, j)?)?.re;
    for (mode, n) in [(i, ni), (j, nj)] {
        if n.abs() < crate::PRUNE_EPSILON {
            return Err(Error::ZeroIntensity { mode });
        }
    }
    let mut pair = alloc::vec![0u32; modes];
    pair[i] += 1;
    pair[j] += 1;
    let pair = OccupationVector::new(pair)?;
    let num = expectation(rho, &CorrelationIndex::diagonal(pair))?.re;
    Ok(num / (ni * nj))
}
