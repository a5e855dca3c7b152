//! Occupation vectors and sparse operators on multimode Fock space.
//!
//! Basis kets follow the usual convention
//! `|n> = prod_i (a_i^dagger)^{n_i} / sqrt(n_i!) |vac>`. Modes are indexed from
//! zero.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigUint;
use num_complex::Complex64;

use crate::combinatorics;
use crate::math;
use crate::{Error, Result, HERMITICITY_TOLERANCE, MAX_PHOTONS, PRUNE_EPSILON};

/// Photon numbers of `d` modes, the Fock label `n`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OccupationVector(Vec<u32>);

impl OccupationVector {
    /// Rejects totals above [`MAX_PHOTONS`].
    pub fn new(occupations: Vec<u32>) -> Result<Self> {
        let total = occupations
            .iter()
            .try_fold(0u32, |acc, &n| acc.checked_add(n))
            .unwrap_or(u32::MAX);
        if total > MAX_PHOTONS {
            return Err(Error::TooManyPhotonsInTerm {
                total,
                cap: MAX_PHOTONS,
            });
        }
        Ok(Self(occupations))
    }

    pub fn from_slice(occupations: &[u32]) -> Result<Self> {
        Self::new(occupations.to_vec())
    }

    pub(crate) fn from_vec_unchecked(occupations: Vec<u32>) -> Self {
        debug_assert!(occupations.iter().sum::<u32>() <= MAX_PHOTONS);
        Self(occupations)
    }

    pub fn vacuum(modes: usize) -> Self {
        Self(vec![0; modes])
    }

    /// `|e_mode>` scaled by `photons`.
    pub fn single_mode(modes: usize, mode: usize, photons: u32) -> Result<Self> {
        if mode >= modes {
            return Err(Error::ModeOutOfRange { mode, modes });
        }
        let mut occ = vec![0; modes];
        occ[mode] = photons;
        Self::new(occ)
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    /// `|n| = sum_i n_i`
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, mode: usize) -> u32 {
        self.0[mode]
    }

    /// `n - e_mode`, or `None` if mode `mode` is empty.
    pub fn lowered(&self, mode: usize) -> Option<Self> {
        let n = *self.0.get(mode)?;
        if n == 0 {
            return None;
        }
        let mut out = self.0.clone();
        out[mode] -= 1;
        Some(Self(out))
    }

    /// Componentwise `self - other`, `None` if any component goes negative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        if self.modes() != other.modes() {
            return None;
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| a.checked_sub(b))
            .collect::<Option<Vec<_>>>()
            .map(Self)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.modes() != other.modes() {
            return Err(Error::ModeMismatch {
                expected: self.modes(),
                found: other.modes(),
            });
        }
        Self::new(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `prod_i n_i!`
    pub fn factorial_product(&self) -> BigUint {
        self.0.iter().map(|&n| combinatorics::factorial(u64::from(n))).product()
    }

    /// `|n|! / prod_i n_i!`
    pub fn multinomial(&self) -> BigUint {
        combinatorics::multinomial(&self.0)
    }

    /// Every occupation vector of `modes` modes with total `total`, in
    /// lexicographic order.
    pub fn with_total(modes: usize, total: u32) -> Vec<Self> {
        let mut out = Vec::new();
        if modes == 0 {
            return out;
        }
        let mut current = vec![0u32; modes];
        fill_compositions(&mut current, 0, total, &mut out, None);
        out
    }

    /// Every `m <= self` (componentwise) with `|m| = total`.
    pub fn dominated_with_total(&self, total: u32) -> Vec<Self> {
        let mut out = Vec::new();
        if total > self.total() {
            return out;
        }
        let mut current = vec![0u32; self.modes()];
        fill_compositions(&mut current, 0, total, &mut out, Some(&self.0));
        out
    }

    /// Every `m` with `|m| <= max_total`, grouped by total.
    pub fn up_to_total(modes: usize, max_total: u32) -> Vec<Self> {
        (0..=max_total).flat_map(|n| Self::with_total(modes, n)).collect()
    }
}

fn fill_compositions(
    current: &mut Vec<u32>,
    index: usize,
    remaining: u32,
    out: &mut Vec<OccupationVector>,
    bound: Option<&[u32]>,
) {
    let last = current.len() - 1;
    let cap = |i: usize| bound.map_or(u32::MAX, |b| b[i]);
    if index == last {
        if remaining <= cap(index) {
            current[index] = remaining;
            out.push(OccupationVector(current.clone()));
        }
        return;
    }
    // The remaining photons must fit in the tail under the bound.
    let tail: u64 = bound.map_or(u64::MAX, |b| b[index + 1..].iter().map(|&x| u64::from(x)).sum());
    for n in (0..=remaining.min(cap(index))).rev() {
        if u64::from(remaining - n) > tail {
            break;
        }
        current[index] = n;
        fill_compositions(current, index + 1, remaining - n, out, bound);
    }
    current[index] = 0;
}

impl fmt::Debug for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ">")
    }
}

/// Key of one matrix element `|ket><bra|`.
///
/// Ordered lexicographically on the bra, then the ket.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct KetBra {
    pub ket: OccupationVector,
    pub bra: OccupationVector,
}

impl KetBra {
    pub fn new(ket: OccupationVector, bra: OccupationVector) -> Self {
        Self { ket, bra }
    }

    pub fn is_diagonal(&self) -> bool {
        self.ket == self.bra
    }

    pub fn transposed(&self) -> Self {
        Self {
            ket: self.bra.clone(),
            bra: self.ket.clone(),
        }
    }
}

impl Ord for KetBra {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bra.cmp(&other.bra).then_with(|| self.ket.cmp(&other.ket))
    }
}

impl PartialOrd for KetBra {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Which side of `|m><n|` an operator acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `a |m><n|`
    Ket,
    /// `|m><n| a^dagger`
    Bra,
    /// `a |m><n| a^dagger`
    Both,
}

/// Sparse operator `sum rho_mn |m><n|` on `modes` bosonic modes.
///
/// Values are immutable; every operation returns a new state. Amplitudes
/// below [`PRUNE_EPSILON`] are dropped on construction.
#[derive(Clone, PartialEq)]
pub struct BeamState {
    modes: usize,
    terms: BTreeMap<KetBra, Complex64>,
}

impl fmt::Debug for BeamState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BeamState")
            .field("modes", &self.modes)
            .field("terms", &self.terms)
            .finish()
    }
}

/// Accumulates amplitudes before pruning into a [`BeamState`].
pub(crate) struct TermAccumulator {
    modes: usize,
    terms: BTreeMap<KetBra, Complex64>,
}

impl TermAccumulator {
    pub(crate) fn new(modes: usize) -> Self {
        Self {
            modes,
            terms: BTreeMap::new(),
        }
    }

    pub(crate) fn add(&mut self, key: KetBra, amplitude: Complex64) {
        if amplitude == Complex64::new(0.0, 0.0) {
            return;
        }
        *self.terms.entry(key).or_insert(Complex64::new(0.0, 0.0)) += amplitude;
    }

    pub(crate) fn add_state(&mut self, state: &BeamState, weight: Complex64) {
        for (key, &a) in &state.terms {
            self.add(key.clone(), a * weight);
        }
    }

    pub(crate) fn finish(self) -> BeamState {
        let mut terms = self.terms;
        terms.retain(|_, a| a.norm_sqr() >= PRUNE_EPSILON * PRUNE_EPSILON);
        BeamState {
            modes: self.modes,
            terms,
        }
    }
}

impl BeamState {
    /// The zero operator.
    pub fn zero(modes: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::NoModes);
        }
        Ok(Self {
            modes,
            terms: BTreeMap::new(),
        })
    }

    /// Sums `(ket, bra, amplitude)` triples. Duplicate keys add up.
    pub fn from_terms<I>(modes: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (OccupationVector, OccupationVector, Complex64)>,
    {
        Self::zero(modes)?;
        let mut acc = TermAccumulator::new(modes);
        for (ket, bra, a) in terms {
            for v in [&ket, &bra] {
                if v.modes() != modes {
                    return Err(Error::ModeMismatch {
                        expected: modes,
                        found: v.modes(),
                    });
                }
            }
            acc.add(KetBra::new(ket, bra), a);
        }
        Ok(acc.finish())
    }

    /// `|psi><psi|` for `psi = sum c_n |n>` (not renormalized).
    pub fn pure<I>(modes: usize, amplitudes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (OccupationVector, Complex64)>,
    {
        let amps: Vec<(OccupationVector, Complex64)> = amplitudes.into_iter().collect();
        Self::from_terms(
            modes,
            amps.iter()
                .flat_map(|(m, cm)| amps.iter().map(move |(n, cn)| (m.clone(), n.clone(), cm * cn.conj()))),
        )
    }

    /// `amplitude |ket><bra|`
    pub fn ket_bra(ket: OccupationVector, bra: OccupationVector, amplitude: Complex64) -> Result<Self> {
        let modes = ket.modes();
        Self::from_terms(modes, [(ket, bra, amplitude)])
    }

    /// `|n><n|`
    pub fn fock(n: OccupationVector) -> Result<Self> {
        Self::ket_bra(n.clone(), n, Complex64::new(1.0, 0.0))
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order (bra, then ket).
    pub fn terms(&self) -> impl Iterator<Item = (&KetBra, Complex64)> + '_ {
        self.terms.iter().map(|(k, &a)| (k, a))
    }

    /// `rho_{ket,bra}`, zero when absent.
    pub fn get(&self, ket: &OccupationVector, bra: &OccupationVector) -> Complex64 {
        // BTreeMap lookups need an owned key.
        self.terms
            .get(&KetBra::new(ket.clone(), bra.clone()))
            .copied()
            .unwrap_or_default()
    }

    pub(crate) fn get_key(&self, key: &KetBra) -> Complex64 {
        self.terms.get(key).copied().unwrap_or_default()
    }

    /// Sum of the real parts of the diagonal amplitudes.
    pub fn trace(&self) -> f64 {
        self.terms
            .iter()
            .filter(|(k, _)| k.is_diagonal())
            .map(|(_, a)| a.re)
            .sum()
    }

    /// `max |a_mn - conj(a_nm)|` over all stored terms.
    pub fn hermitian_error(&self) -> f64 {
        self.terms
            .iter()
            .map(|(k, a)| {
                let partner = self.get_key(&k.transposed());
                math::sqrt((a - partner.conj()).norm_sqr())
            })
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tolerance: f64) -> bool {
        self.hermitian_error() <= tolerance
    }

    /// Divides by the trace.
    pub fn normalize(&self) -> Result<Self> {
        let tr = self.trace();
        if tr.abs() < PRUNE_EPSILON {
            return Err(Error::ZeroTrace);
        }
        Ok(self.scaled(1.0 / tr))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.scaled_complex(Complex64::new(factor, 0.0))
    }

    pub fn scaled_complex(&self, factor: Complex64) -> Self {
        let mut acc = TermAccumulator::new(self.modes);
        acc.add_state(self, factor);
        acc.finish()
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        self.check_modes(other.modes)?;
        let mut acc = TermAccumulator::new(self.modes);
        acc.add_state(self, Complex64::new(1.0, 0.0));
        acc.add_state(other, Complex64::new(1.0, 0.0));
        Ok(acc.finish())
    }

    /// Linear combination `sum w_i rho_i` of states with a common mode count.
    pub fn combine<'a, I>(modes: usize, parts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, &'a BeamState)>,
    {
        let mut acc = TermAccumulator::new(modes);
        for (w, s) in parts {
            if s.modes != modes {
                return Err(Error::ModeMismatch {
                    expected: modes,
                    found: s.modes,
                });
            }
            acc.add_state(s, Complex64::new(w, 0.0));
        }
        Ok(acc.finish())
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let terms = self.terms.iter().map(|(k, a)| (k.transposed(), a.conj())).collect();
        Self {
            modes: self.modes,
            terms,
        }
    }

    /// Largest entrywise `|a - b|` over the union of stored keys.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.modes != other.modes && (self.len() + other.len()) > 0 {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for (k, a) in &self.terms {
            worst = worst.max(math::sqrt((a - other.get_key(k)).norm_sqr()));
        }
        for (k, b) in &other.terms {
            if !self.terms.contains_key(k) {
                worst = worst.max(math::sqrt(b.norm_sqr()));
            }
        }
        worst
    }

    /// `Tr(rho^2)`, real part.
    pub fn purity(&self) -> f64 {
        self.terms
            .iter()
            .map(|(k, a)| (a * self.get_key(&k.transposed())).re)
            .sum()
    }

    /// Largest photon total appearing in any ket or bra.
    pub fn max_photons(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.ket.total().max(k.bra.total())).max()
    }

    /// True when every term has `|ket| = |bra| = n`.
    pub fn is_fixed(&self, n: u32) -> bool {
        self.terms.keys().all(|k| k.ket.total() == n && k.bra.total() == n)
    }

    /// Checks that every term lives in the `n`-photon sector.
    pub fn require_fixed(&self, n: u32) -> Result<()> {
        match self.terms.keys().find(|k| k.ket.total() != n || k.bra.total() != n) {
            None => Ok(()),
            Some(k) => Err(Error::NotFixedN {
                expected: n,
                ket: k.ket.total(),
                bra: k.bra.total(),
            }),
        }
    }

    /// `f(|m|) g(|n|) rho_mn` for every term: `f(N) rho g(N)` for functions of
    /// the total number operator.
    pub fn number_dressed(&self, ket: impl Fn(u32) -> f64, bra: impl Fn(u32) -> f64) -> Self {
        let mut acc = TermAccumulator::new(self.modes);
        for (k, &a) in &self.terms {
            let w = ket(k.ket.total()) * bra(k.bra.total());
            acc.add(k.clone(), a * w);
        }
        acc.finish()
    }

    /// `P_n rho P_n`
    pub fn sector(&self, n: u32) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| k.ket.total() == n && k.bra.total() == n)
            .map(|(k, &a)| (k.clone(), a))
            .collect();
        Self {
            modes: self.modes,
            terms,
        }
    }

    /// Dense row-major block of the `n`-photon sector in
    /// [`OccupationVector::with_total`] order.
    pub fn dense_sector(&self, n: u32) -> (Vec<OccupationVector>, Vec<Complex64>) {
        let basis = OccupationVector::with_total(self.modes, n);
        let index: BTreeMap<&OccupationVector, usize> = basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let dim = basis.len();
        let mut dense = vec![Complex64::default(); dim * dim];
        for (k, &a) in &self.terms {
            if let (Some(&r), Some(&c)) = (index.get(&k.ket), index.get(&k.bra)) {
                dense[r * dim + c] = a;
            }
        }
        (basis, dense)
    }

    /// Action of `a_mode` on one or both sides with exact `sqrt(n)` factors.
    /// Terms annihilated on the acted side are dropped.
    pub fn apply_annihilation(&self, mode: usize, side: Side) -> Result<Self> {
        if mode >= self.modes {
            return Err(Error::ModeOutOfRange {
                mode,
                modes: self.modes,
            });
        }
        let mut acc = TermAccumulator::new(self.modes);
        for (k, &a) in &self.terms {
            if let Some((key, w)) = annihilate_term(k, mode, side) {
                acc.add(key, a * w);
            }
        }
        Ok(acc.finish())
    }

    pub fn sector_decompose(&self) -> Result<SectorDecomposition> {
        self.sector_decompose_with_tolerance(HERMITICITY_TOLERANCE)
    }

    /// Splits into normalized fixed-photon-number sectors `rho_N` with weights
    /// `p_N = Tr(P_N rho P_N)` plus the `|m| != |n|` remainder.
    pub fn sector_decompose_with_tolerance(&self, tolerance: f64) -> Result<SectorDecomposition> {
        let error = self.hermitian_error();
        if error > tolerance {
            return Err(Error::NonHermitianState { error, tolerance });
        }
        let mut blocks: BTreeMap<u32, BTreeMap<KetBra, Complex64>> = BTreeMap::new();
        let mut cross = BTreeMap::new();
        for (k, &a) in &self.terms {
            let (m, n) = (k.ket.total(), k.bra.total());
            if m == n {
                blocks.entry(m).or_default().insert(k.clone(), a);
            } else {
                cross.insert(k.clone(), a);
            }
        }
        let mut sectors = BTreeMap::new();
        for (photons, terms) in blocks {
            let block = Self {
                modes: self.modes,
                terms,
            };
            let weight = block.trace();
            if weight <= PRUNE_EPSILON {
                return Err(Error::NonPhysicalSector { photons, weight });
            }
            let state = block.scaled(1.0 / weight);
            sectors.insert(
                photons,
                Sector {
                    probability: weight,
                    state,
                    block,
                },
            );
        }
        Ok(SectorDecomposition {
            modes: self.modes,
            sectors,
            cross_terms: Self {
                modes: self.modes,
                terms: cross,
            },
        })
    }

    fn check_modes(&self, modes: usize) -> Result<()> {
        if modes != self.modes {
            return Err(Error::ModeMismatch {
                expected: self.modes,
                found: modes,
            });
        }
        Ok(())
    }
}

/// Ladder factor and new key for `a_mode` acting on `|m><n|`.
pub(crate) fn annihilate_term(k: &KetBra, mode: usize, side: Side) -> Option<(KetBra, f64)> {
    match side {
        Side::Ket => {
            let m = k.ket.get(mode);
            let ket = k.ket.lowered(mode)?;
            Some((KetBra::new(ket, k.bra.clone()), math::sqrt(f64::from(m))))
        }
        Side::Bra => {
            let n = k.bra.get(mode);
            let bra = k.bra.lowered(mode)?;
            Some((KetBra::new(k.ket.clone(), bra), math::sqrt(f64::from(n))))
        }
        Side::Both => {
            let (m, n) = (k.ket.get(mode), k.bra.get(mode));
            let ket = k.ket.lowered(mode)?;
            let bra = k.bra.lowered(mode)?;
            // sqrt(m n) in one rounding
            Some((KetBra::new(ket, bra), math::sqrt(f64::from(m * n))))
        }
    }
}

/// One fixed-photon-number sector of a state.
#[derive(Clone, Debug, PartialEq)]
pub struct Sector {
    /// `p_N`
    pub probability: f64,
    /// `rho_N`, unit trace.
    pub state: BeamState,
    /// `p_N rho_N` exactly as stored in the source state.
    pub block: BeamState,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SectorDecomposition {
    pub modes: usize,
    pub sectors: BTreeMap<u32, Sector>,
    /// Terms with `|m| != |n|`.
    pub cross_terms: BeamState,
}

impl SectorDecomposition {
    /// `sum_N p_N`
    pub fn total_probability(&self) -> f64 {
        self.sectors.values().map(|s| s.probability).sum()
    }

    /// Puts the stored blocks and cross terms back together.
    pub fn reassemble(&self) -> BeamState {
        let mut terms = self.cross_terms.terms.clone();
        for s in self.sectors.values() {
            terms.extend(s.block.terms.iter().map(|(k, &a)| (k.clone(), a)));
        }
        BeamState {
            modes: self.modes,
            terms,
        }
    }
}


#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;

    #[test]
    fn occupation_cap_is_enforced() {
        assert!(OccupationVector::from_slice(&[64]).is_ok());
        assert!(OccupationVector::from_slice(&[32, 33]).is_err());
        assert_eq!(occ(&[2, 1, 3]).total(), 6);
    }

    #[test]
    fn compositions_are_complete() {
        let all = OccupationVector::with_total(3, 4);
        assert_eq!(all.len(), 15);
        assert!(all.iter().all(|v| v.total() == 4));
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 15);
        let dom = occ(&[2, 0, 3]).dominated_with_total(3);
        assert_eq!(dom, alloc::vec![occ(&[2, 0, 1]), occ(&[1, 0, 2]), occ(&[0, 0, 3])]);
        assert!(occ(&[1, 1]).dominated_with_total(3).is_empty());
    }

    #[test]
    fn ketbra_order_is_bra_first() {
        let a = KetBra::new(occ(&[1, 0]), occ(&[0, 1]));
        let b = KetBra::new(occ(&[0, 1]), occ(&[1, 0]));
        assert!(a < b);
    }

    #[test]
    fn trace_hermiticity_and_normalize() {
        assert_eq!(fock(&[1, 0]).trace(), 1.0);
        let coh = terms(1, &[(&[0], &[1], c(0.5)), (&[1], &[0], c(0.5))]);
        assert_eq!(coh.hermitian_error(), 0.0);
        let skew = terms(1, &[(&[0], &[1], c(0.5))]);
        assert_eq!(skew.hermitian_error(), 0.5);
        let two = fock(&[1, 0]).scaled(2.0);
        assert_eq!(two.normalize().unwrap(), fock(&[1, 0]));
        assert_eq!(BeamState::zero(2).unwrap().normalize(), Err(Error::ZeroTrace));
    }

    #[test]
    fn annihilation_examples() {
        let s = fock(&[2, 0]);
        assert_eq!(s.apply_annihilation(0, Side::Both).unwrap(), fock(&[1, 0]).scaled(2.0));
        assert!(s.apply_annihilation(1, Side::Both).unwrap().is_empty());
        let kb = terms(1, &[(&[1], &[0], c(1.0))]);
        assert_eq!(kb.apply_annihilation(0, Side::Ket).unwrap(), fock(&[0]));
        assert!(kb.apply_annihilation(0, Side::Bra).unwrap().is_empty());
        assert_eq!(
            s.apply_annihilation(2, Side::Both),
            Err(Error::ModeOutOfRange { mode: 2, modes: 2 })
        );
    }

    #[test]
    fn annihilation_on_number_states_scales_by_occupation() {
        for d in 1..=4usize {
            for n in OccupationVector::up_to_total(d, 6) {
                let s = BeamState::fock(n.clone()).unwrap();
                for i in 0..d {
                    let out = s.apply_annihilation(i, Side::Both).unwrap();
                    match n.lowered(i) {
                        None => assert!(out.is_empty()),
                        Some(low) => {
                            let expect = BeamState::fock(low).unwrap().scaled(f64::from(n.get(i)));
                            assert!(out.max_abs_diff(&expect) < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn annihilation_preserves_hermiticity() {
        let mut rng = Lcg(5);
        let basis = OccupationVector::up_to_total(2, 4);
        let rho = random_mixed(2, &basis, 3, &mut rng);
        for i in 0..2 {
            assert!(rho.apply_annihilation(i, Side::Both).unwrap().hermitian_error() < 1e-15);
        }
    }

    #[test]
    fn sector_decompose_examples() {
        let d = fock(&[1, 0]).sector_decompose().unwrap();
        assert_eq!(d.sectors.len(), 1);
        assert_eq!(d.sectors[&1].probability, 1.0);
        assert_eq!(d.sectors[&1].state, fock(&[1, 0]));
        assert!(d.cross_terms.is_empty());

        let mix = terms(2, &[(&[0, 0], &[0, 0], c(0.5)), (&[2, 0], &[2, 0], c(0.5))]);
        let d = mix.sector_decompose().unwrap();
        assert_eq!(d.sectors[&0].probability, 0.5);
        assert_eq!(d.sectors[&0].state, fock(&[0, 0]));
        assert_eq!(d.sectors[&2].probability, 0.5);
        assert_eq!(d.sectors[&2].state, fock(&[2, 0]));

        let h = core::f64::consts::FRAC_1_SQRT_2;
        let plus = pure(1, &[(&[0], c(h)), (&[1], c(h))]);
        let d = plus.sector_decompose().unwrap();
        assert!((d.sectors[&0].probability - 0.5).abs() < 1e-15);
        assert!((d.sectors[&1].probability - 0.5).abs() < 1e-15);
        assert!(d.sectors[&1].state.max_abs_diff(&fock(&[1])) < 1e-15);
        let cross = terms(1, &[(&[0], &[1], c(0.5)), (&[1], &[0], c(0.5))]);
        assert!(d.cross_terms.max_abs_diff(&cross) < 1e-15);
    }

    #[test]
    fn sector_decompose_rejects_non_hermitian() {
        let skew = terms(1, &[(&[0], &[1], c(0.5)), (&[0], &[0], c(1.0))]);
        assert!(matches!(skew.sector_decompose(), Err(Error::NonHermitianState { .. })));
    }

    #[test]
    fn reassembly_is_exact() {
        let mut rng = Lcg(11);
        for d in 1..=3 {
            let basis = OccupationVector::up_to_total(d, 4);
            let rho = random_mixed(d, &basis, 2, &mut rng);
            let dec = rho.sector_decompose().unwrap();
            assert_eq!(dec.reassemble(), rho);
            let tr_diag: f64 = (0..=4).map(|n| rho.sector(n).trace()).sum();
            assert!((dec.total_probability() - tr_diag).abs() < 1e-14);
            for s in dec.sectors.values() {
                assert!((s.state.trace() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn purity_of_pure_state_is_one() {
        let mut rng = Lcg(3);
        let basis = OccupationVector::up_to_total(2, 3);
        let psi = random_pure(2, &basis, &mut rng);
        assert!((psi.purity() - 1.0).abs() < 1e-13);
    }
}
