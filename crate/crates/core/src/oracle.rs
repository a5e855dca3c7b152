//! Dense first-quantized picture of fixed photon-number states.
//!
//! An `N`-photon state of `d` modes is embedded in `(C^d)^{\otimes N}`: the
//! Fock ket `|n>` becomes the normalized sum of all slot sequences in which
//! mode `i` appears `n_i` times. Removing a photon is then an ordinary partial
//! trace over one slot. Everything is dense and deliberately naive, so it can
//! serve as an independent check of the second-quantized formulas.
//!
//! Slot sequences are indexed in base `d` with slot 0 as the most significant
//! digit.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::combinatorics::multinomial_f64;
use crate::fock::{BeamState, OccupationVector, TermAccumulator};
use crate::math;
use crate::{Error, Result};

/// Default cap on `d^N`.
pub const DIMENSION_CAP: usize = 4096;

/// Largest deviation from permutation symmetry accepted between steps.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Largest weight outside the symmetric subspace accepted when converting back.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Dense operator on `N` distinguishable slots of dimension `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct FirstQuantizedOperator {
    modes: usize,
    particles: u32,
    dimension: usize,
    /// Row-major `dimension x dimension`.
    entries: Vec<Complex64>,
}

fn dimension(modes: usize, particles: u32, cap: usize) -> Result<usize> {
    match modes.checked_pow(particles) {
        Some(dim) if dim <= cap => Ok(dim),
        Some(dim) => Err(Error::DimensionCap { dimension: dim, cap }),
        None => Err(Error::DimensionCap {
            dimension: usize::MAX,
            cap,
        }),
    }
}

fn digits(mut word: usize, modes: usize, particles: u32) -> Vec<usize> {
    let mut out = vec![0; particles as usize];
    for slot in (0..particles as usize).rev() {
        out[slot] = word % modes;
        word /= modes;
    }
    out
}

fn word(digits: &[usize], modes: usize) -> usize {
    digits.iter().fold(0, |acc, &x| acc * modes + x)
}

fn occupation(word: usize, modes: usize, particles: u32) -> Vec<u32> {
    let mut n = vec![0u32; modes];
    for i in digits(word, modes, particles) {
        n[i] += 1;
    }
    n
}

/// All slot sequences grouped by occupation vector.
fn words_by_occupation(modes: usize, particles: u32, dim: usize) -> BTreeMap<Vec<u32>, Vec<usize>> {
    let mut out: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
    for w in 0..dim {
        out.entry(occupation(w, modes, particles)).or_default().push(w);
    }
    out
}

/// The symmetric vector representing `|n>`.
pub fn symmetric_ket(n: &OccupationVector) -> Result<Vec<Complex64>> {
    let (modes, particles) = (n.modes(), n.total());
    let dim = dimension(modes, particles, DIMENSION_CAP)?;
    let amp = 1.0 / math::sqrt(multinomial_f64(n.as_slice()));
    Ok((0..dim)
        .map(|w| {
            if occupation(w, modes, particles) == n.as_slice() {
                Complex64::new(amp, 0.0)
            } else {
                Complex64::default()
            }
        })
        .collect())
}

/// Embeds an `N`-photon state with the default cap on `d^N`.
pub fn to_first_quantized(rho_n: &BeamState, n: u32) -> Result<FirstQuantizedOperator> {
    to_first_quantized_with_cap(rho_n, n, DIMENSION_CAP)
}

pub fn to_first_quantized_with_cap(rho_n: &BeamState, n: u32, cap: usize) -> Result<FirstQuantizedOperator> {
    rho_n.require_fixed(n)?;
    let modes = rho_n.modes();
    let dim = dimension(modes, n, cap)?;
    let words = words_by_occupation(modes, n, dim);
    let mut entries = vec![Complex64::default(); dim * dim];
    for (key, a) in rho_n.terms() {
        let (rows, cols) = (&words[key.ket.as_slice()], &words[key.bra.as_slice()]);
        let norm = math::sqrt(multinomial_f64(key.ket.as_slice()) * multinomial_f64(key.bra.as_slice()));
        let a = a / norm;
        for &r in rows {
            for &c in cols {
                entries[r * dim + c] += a;
            }
        }
    }
    Ok(FirstQuantizedOperator {
        modes,
        particles: n,
        dimension: dim,
        entries,
    })
}

impl FirstQuantizedOperator {
    /// Wraps a raw row-major matrix over `modes^particles` slot sequences.
    pub fn from_entries(modes: usize, particles: u32, entries: Vec<Complex64>) -> Result<Self> {
        if modes == 0 {
            return Err(Error::NoModes);
        }
        let dim = dimension(modes, particles, DIMENSION_CAP)?;
        if entries.len() != dim * dim {
            return Err(Error::NotSquare {
                rows: dim,
                cols: entries.len() / dim.max(1),
            });
        }
        Ok(Self {
            modes,
            particles,
            dimension: dim,
            entries,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn particles(&self) -> u32 {
        self.particles
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dimension + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dimension).map(|i| self.entry(i, i)).sum()
    }

    /// Largest change of any entry under an adjacent slot transposition
    /// applied on the left or on the right.
    pub fn symmetry_error(&self) -> f64 {
        let (d, n, dim) = (self.modes, self.particles as usize, self.dimension);
        if n < 2 {
            return 0.0;
        }
        let swapped: Vec<Vec<usize>> = (0..n - 1)
            .map(|k| {
                (0..dim)
                    .map(|w| {
                        let mut s = digits(w, d, self.particles);
                        s.swap(k, k + 1);
                        word(&s, d)
                    })
                    .collect()
            })
            .collect();
        let mut err = 0.0f64;
        for p in &swapped {
            for r in 0..dim {
                for c in 0..dim {
                    let x = self.entry(r, c);
                    err = err
                        .max((self.entry(p[r], c) - x).norm_sqr())
                        .max((self.entry(r, p[c]) - x).norm_sqr());
                }
            }
        }
        math::sqrt(err)
    }

    fn require_symmetric(self) -> Result<Self> {
        let error = self.symmetry_error();
        if error > SYMMETRY_TOLERANCE {
            return Err(Error::NotSymmetric { error });
        }
        Ok(self)
    }

    /// Contracts the ket and bra index of one slot. The result is checked for
    /// permutation symmetry.
    pub fn trace_out_slot(&self, slot: usize) -> Result<Self> {
        if self.particles == 0 {
            return Err(Error::EmptyTensor);
        }
        if slot >= self.particles as usize {
            return Err(Error::ModeOutOfRange {
                mode: slot,
                modes: self.particles as usize,
            });
        }
        let (d, particles) = (self.modes, self.particles - 1);
        let dim = self.dimension / d;
        let lift = |w: usize, i: usize| {
            let mut s = digits(w, d, particles);
            s.insert(slot, i);
            word(&s, d)
        };
        let lifted: Vec<Vec<usize>> = (0..dim).map(|w| (0..d).map(|i| lift(w, i)).collect()).collect();
        let mut entries = vec![Complex64::default(); dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                entries[r * dim + c] = (0..d).map(|i| self.entry(lifted[r][i], lifted[c][i])).sum();
            }
        }
        Self {
            modes: d,
            particles,
            dimension: dim,
            entries,
        }
        .require_symmetric()
    }

    /// Same as `trace_out_slot(0)`.
    pub fn trace_out_first(&self) -> Result<Self> {
        self.trace_out_slot(0)
    }
}

/// Projects back onto the symmetric Fock basis. Returns the state and the
/// largest entry of the part not captured by it.
pub fn from_first_quantized(op: &FirstQuantizedOperator) -> Result<(BeamState, f64)> {
    let error = op.symmetry_error();
    if error > SYMMETRY_TOLERANCE {
        return Err(Error::NotSymmetric { error });
    }
    let (d, n, dim) = (op.modes, op.particles, op.dimension);
    let words = words_by_occupation(d, n, dim);
    let basis: Vec<(&Vec<u32>, &Vec<usize>, f64)> = words
        .iter()
        .map(|(occ, ws)| (occ, ws, 1.0 / math::sqrt(multinomial_f64(occ))))
        .collect();

    let mut acc = TermAccumulator::new(d);
    let mut rebuilt = vec![Complex64::default(); dim * dim];
    for (m, rows, am) in &basis {
        for (k, cols, ak) in &basis {
            let amp: Complex64 = rows
                .iter()
                .flat_map(|&r| cols.iter().map(move |&c| (r, c)))
                .map(|(r, c)| op.entry(r, c))
                .sum::<Complex64>()
                * am
                * ak;
            for &r in rows.iter() {
                for &c in cols.iter() {
                    rebuilt[r * dim + c] = amp * am * ak;
                }
            }
            let key = crate::KetBra::new(
                OccupationVector::from_vec_unchecked((*m).clone()),
                OccupationVector::from_vec_unchecked((*k).clone()),
            );
            acc.add(key, amp);
        }
    }
    let residual = rebuilt
        .iter()
        .zip(&op.entries)
        .map(|(a, b)| (a - b).norm_sqr())
        .fold(0.0, f64::max);
    let residual = math::sqrt(residual);
    if residual > RESIDUAL_TOLERANCE {
        return Err(Error::NotSymmetric { error: residual });
    }
    Ok((acc.finish(), residual))
}

/// `from_first_quantized(trace_out_slot(to_first_quantized(rho_n), slot))`.
pub fn remove_one_by_oracle(rho_n: &BeamState, n: u32, slot: usize) -> Result<BeamState> {
    let op = to_first_quantized(rho_n, n)?;
    Ok(from_first_quantized(&op.trace_out_slot(slot)?)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::test_support::*;
    use crate::removal::remove_one_fixed_n;

    const H: f64 = core::f64::consts::FRAC_1_SQRT_2;

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm_sqr() <= tol * tol)
    }

    #[test]
    fn symmetric_ket_examples() {
        let z = c(0.0);
        // slot words for d = 2: 0 -> |11>, 1 -> |12>, 2 -> |21>, 3 -> |22>
        assert!(close(
            &symmetric_ket(&occ(&[1, 1])).unwrap(),
            &[z, c(H), c(H), z],
            1e-15
        ));
        assert!(close(&symmetric_ket(&occ(&[2, 0])).unwrap(), &[c(1.0), z, z, z], 1e-15));
        let t = 1.0 / libm::sqrt(3.0);
        // |112>, |121>, |211> are words 1, 2, 4
        let expect = [z, c(t), c(t), z, c(t), z, z, z];
        assert!(close(&symmetric_ket(&occ(&[2, 1])).unwrap(), &expect, 1e-15));
    }

    #[test]
    fn dimension_cap() {
        assert!(matches!(
            to_first_quantized(&fock(&[13, 0]), 13),
            Err(Error::DimensionCap { .. })
        ));
        assert!(to_first_quantized_with_cap(&fock(&[3, 0]), 3, 4).is_err());
        assert!(matches!(
            to_first_quantized(&fock(&[1, 0]), 2),
            Err(Error::NotFixedN { .. })
        ));
    }

    #[test]
    fn trace_out_examples() {
        // (|12> + |21>)/sqrt 2 reduces to I/2 on one slot
        let bell = to_first_quantized(&fock(&[1, 1]), 2).unwrap();
        let one = bell.trace_out_first().unwrap();
        assert!(close(one.entries(), &[c(0.5), c(0.0), c(0.0), c(0.5)], 1e-15));

        let op = to_first_quantized(&fock(&[2, 0]), 2).unwrap();
        let one = op.trace_out_first().unwrap();
        assert!(close(one.entries(), &[c(1.0), c(0.0), c(0.0), c(0.0)], 1e-15));

        let vac = to_first_quantized(&fock(&[0, 0]), 0).unwrap();
        assert_eq!(vac.trace_out_first(), Err(Error::EmptyTensor));
    }

    #[test]
    fn slot_projection() {
        // <i| on slot 0 of |n> is sqrt(n_i / N) |n - e_i>
        for n in [occ(&[2, 1]), occ(&[1, 1, 2]), occ(&[0, 3, 1])] {
            let (d, total) = (n.modes(), n.total());
            let ket = symmetric_ket(&n).unwrap();
            let rest = ket.len() / d;
            for i in 0..d {
                let projected = &ket[i * rest..(i + 1) * rest];
                let expect: Vec<Complex64> = match n.lowered(i) {
                    Some(lower) => symmetric_ket(&lower)
                        .unwrap()
                        .into_iter()
                        .map(|x| x * libm::sqrt(f64::from(n.get(i)) / f64::from(total)))
                        .collect(),
                    None => vec![c(0.0); rest],
                };
                assert!(close(projected, &expect, 1e-15));
            }
        }
    }

    #[test]
    fn round_trip_and_removal() {
        let rho = pure(2, &[(&[2, 1], c(0.6)), (&[0, 3], Complex64::new(0.0, 0.8))]);
        let op = to_first_quantized(&rho, 3).unwrap();
        assert!((op.trace() - c(1.0)).norm() < 1e-15);
        let (back, residual) = from_first_quantized(&op).unwrap();
        assert!(residual < 1e-14);
        assert!(back.max_abs_diff(&rho) < 1e-15);

        let reduced = remove_one_by_oracle(&fock(&[1, 1]), 2, 0).unwrap();
        assert!(reduced.max_abs_diff(&terms(2, &[(&[1, 0], &[1, 0], c(0.5)), (&[0, 1], &[0, 1], c(0.5))])) < 1e-15);
    }

    #[test]
    fn asymmetric_input_rejected() {
        // |12><12| alone is not symmetric
        let mut entries = vec![c(0.0); 16];
        entries[5] = c(1.0);
        let op = FirstQuantizedOperator::from_entries(2, 2, entries).unwrap();
        assert!(matches!(from_first_quantized(&op), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn agrees_with_fixed_n_removal_on_basis() {
        for d in 1..=3 {
            for n in 1..=4 {
                let basis = OccupationVector::with_total(d, n);
                for m in &basis {
                    for k in &basis {
                        let rho = BeamState::ket_bra(m.clone(), k.clone(), c(1.0)).unwrap();
                        let oracle = remove_one_by_oracle(&rho, n, 0).unwrap();
                        assert!(oracle.max_abs_diff(&remove_one_fixed_n(&rho, n).unwrap()) < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn slot_choice_is_irrelevant() {
        let mut rng = Lcg(3);
        let rho = random_mixed(3, &OccupationVector::with_total(3, 3), 2, &mut rng);
        let first = remove_one_by_oracle(&rho, 3, 0).unwrap();
        for slot in 1..3 {
            assert!(remove_one_by_oracle(&rho, 3, slot).unwrap().max_abs_diff(&first) < 1e-12);
        }
    }
}
