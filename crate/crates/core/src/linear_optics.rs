//! Passive linear optics on Fock states.
//!
//! A [`ModeUnitary`] `U` acts as `a_i^dagger -> sum_j U_ij a_j^dagger`. Fock
//! transition amplitudes are
//! `<m|U|n> = perm(U[n, m]) / sqrt(prod n_i! prod m_j!)`, where `U[n, m]`
//! repeats row `i` of `U` `n_i` times and column `j` `m_j` times.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::combinatorics::to_f64;
use crate::fock::{BeamState, KetBra, OccupationVector, TermAccumulator};
use crate::math;
use crate::{Error, Result, PRUNE_EPSILON};

/// Largest matrix accepted by [`permanent`].
pub const PERMANENT_LIMIT: usize = 12;

/// Largest photon number accepted by [`apply_unitary`].
pub const PHOTON_LIMIT: u32 = 8;

/// Tolerance on `|U U^dagger - I|` when constructing a [`ModeUnitary`].
pub const UNITARITY_TOLERANCE: f64 = 1e-12;

/// A `d x d` unitary, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeUnitary {
    modes: usize,
    entries: Vec<Complex64>,
}

impl ModeUnitary {
    pub fn new(modes: usize, entries: Vec<Complex64>) -> Result<Self> {
        if modes == 0 {
            return Err(Error::NoModes);
        }
        if entries.len() != modes * modes {
            return Err(Error::NotSquare {
                rows: modes,
                cols: entries.len() / modes,
            });
        }
        let u = Self { modes, entries };
        let error = u.unitarity_error();
        if error > UNITARITY_TOLERANCE {
            return Err(Error::NonUnitary { error });
        }
        Ok(u)
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let modes = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != modes) {
            return Err(Error::NotSquare {
                rows: modes,
                cols: bad.len(),
            });
        }
        Self::new(modes, rows.iter().flatten().copied().collect())
    }

    pub fn identity(modes: usize) -> Self {
        let mut entries = vec![Complex64::default(); modes * modes];
        for i in 0..modes {
            entries[i * modes + i] = Complex64::new(1.0, 0.0);
        }
        Self { modes, entries }
    }

    /// `[[1, 1], [1, -1]] / sqrt 2`
    pub fn balanced_beam_splitter() -> Self {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let entries = [h, h, h, -h].iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self { modes: 2, entries }
    }

    /// Sends mode `i` to mode `perm[i]`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let modes = perm.len();
        let mut entries = vec![Complex64::default(); modes * modes];
        for (i, &j) in perm.iter().enumerate() {
            if j >= modes {
                return Err(Error::ModeOutOfRange { mode: j, modes });
            }
            entries[i * modes + j] = Complex64::new(1.0, 0.0);
        }
        Self::new(modes, entries)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.modes + col]
    }

    /// `max |(U U^dagger - I)_ij|`
    pub fn unitarity_error(&self) -> f64 {
        let d = self.modes;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let mut s: Complex64 = (0..d).map(|k| self.entry(i, k) * self.entry(j, k).conj()).sum();
                if i == j {
                    s -= 1.0;
                }
                worst = worst.max(math::sqrt(s.norm_sqr()));
            }
        }
        worst
    }

    pub fn dagger(&self) -> Self {
        let d = self.modes;
        let mut entries = vec![Complex64::default(); d * d];
        for i in 0..d {
            for j in 0..d {
                entries[j * d + i] = self.entry(i, j).conj();
            }
        }
        Self { modes: d, entries }
    }
}

/// Ryser's formula with Gray-code subset order, `O(2^n n)`. `matrix` is
/// row-major with side `side`; the empty matrix has permanent 1.
pub fn permanent(matrix: &[Complex64], side: usize) -> Result<Complex64> {
    if matrix.len() != side * side {
        return Err(Error::NotSquare {
            rows: side,
            cols: matrix.len().checked_div(side).unwrap_or(0),
        });
    }
    if side > PERMANENT_LIMIT {
        return Err(Error::TooLarge {
            side,
            limit: PERMANENT_LIMIT,
        });
    }
    if side == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let mut row_sums = vec![Complex64::default(); side];
    let mut total = Complex64::default();
    let mut gray: u32 = 0;
    for k in 1u32..(1 << side) {
        let col = k.trailing_zeros() as usize;
        let bit = 1u32 << col;
        let adding = gray & bit == 0;
        gray ^= bit;
        for (r, s) in row_sums.iter_mut().enumerate() {
            let a = matrix[r * side + col];
            if adding {
                *s += a;
            } else {
                *s -= a;
            }
        }
        let prod: Complex64 = row_sums.iter().product();
        if gray.count_ones() % 2 == 0 {
            total += prod;
        } else {
            total -= prod;
        }
    }
    if side % 2 == 1 {
        total = -total;
    }
    Ok(total)
}

fn repeated_modes(occ: &OccupationVector) -> Vec<usize> {
    occ.as_slice()
        .iter()
        .enumerate()
        .flat_map(|(mode, &n)| core::iter::repeat_n(mode, n as usize))
        .collect()
}

/// `<output| U |input>`
pub fn fock_amplitude(u: &ModeUnitary, output: &OccupationVector, input: &OccupationVector) -> Result<Complex64> {
    if output.total() != input.total() {
        return Ok(Complex64::default());
    }
    let rows = repeated_modes(input);
    let cols = repeated_modes(output);
    let side = rows.len();
    let mut sub = Vec::with_capacity(side * side);
    for &r in &rows {
        for &c in &cols {
            sub.push(u.entry(r, c));
        }
    }
    let perm = permanent(&sub, side)?;
    let norm = math::sqrt(to_f64(&(input.factorial_product() * output.factorial_product())));
    Ok(perm / norm)
}

/// `U |input>` expanded in the Fock basis of the same photon number.
fn transformed_ket(u: &ModeUnitary, input: &OccupationVector) -> Result<Vec<(OccupationVector, Complex64)>> {
    let mut out = Vec::new();
    for output in OccupationVector::with_total(u.modes(), input.total()) {
        let amp = fock_amplitude(u, &output, input)?;
        if amp.norm_sqr() >= PRUNE_EPSILON * PRUNE_EPSILON {
            out.push((output, amp));
        }
    }
    Ok(out)
}

/// Dense matrix of `U` restricted to the `n`-photon sector, in
/// [`OccupationVector::with_total`] order. Row index is the output.
pub fn sector_matrix(u: &ModeUnitary, n: u32) -> Result<(Vec<OccupationVector>, Vec<Complex64>)> {
    let basis = OccupationVector::with_total(u.modes(), n);
    let dim = basis.len();
    let mut dense = vec![Complex64::default(); dim * dim];
    for (c, input) in basis.iter().enumerate() {
        for (r, output) in basis.iter().enumerate() {
            dense[r * dim + c] = fock_amplitude(u, output, input)?;
        }
    }
    Ok((basis, dense))
}

/// `U rho U^dagger`.
pub fn apply_unitary(rho: &BeamState, u: &ModeUnitary) -> Result<BeamState> {
    if u.modes() != rho.modes() {
        return Err(Error::ModeMismatch {
            expected: rho.modes(),
            found: u.modes(),
        });
    }
    if let Some(max) = rho.max_photons() {
        if max > PHOTON_LIMIT {
            return Err(Error::TooManyPhotons {
                photons: max,
                limit: PHOTON_LIMIT,
            });
        }
    }
    let mut columns: BTreeMap<OccupationVector, Vec<(OccupationVector, Complex64)>> = BTreeMap::new();
    for (key, _) in rho.terms() {
        for v in [&key.ket, &key.bra] {
            if !columns.contains_key(v) {
                columns.insert(v.clone(), transformed_ket(u, v)?);
            }
        }
    }
    let mut acc = TermAccumulator::new(rho.modes());
    for (key, a) in rho.terms() {
        for (m, am) in &columns[&key.ket] {
            for (n, an) in &columns[&key.bra] {
                acc.add(KetBra::new(m.clone(), n.clone()), a * am * an.conj());
            }
        }
    }
    Ok(acc.finish())
}
