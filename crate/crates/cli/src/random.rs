//! Seeded test families.
//!
//! The generator is ChaCha8 seeded with `seed_from_u64`. Uniform draws take
//! the top 53 bits of `next_u64` scaled by `2^-53`; Gaussian draws use the
//! cosine branch of Box-Muller on two uniform draws. States are Gram
//! matrices `sum_r v_r v_r^dagger` of complex Gaussian vectors, normalized to
//! unit trace, so they are Hermitian and positive semidefinite by
//! construction.

use clap::ValueEnum;
use nalgebra::DMatrix;
use num_complex::Complex64;
use photon_subset::linear_optics::ModeUnitary;
use photon_subset::{BeamState, OccupationVector};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::CliError;

pub const MAX_RANDOM_MODES: usize = 4;
pub const MAX_RANDOM_PHOTONS: u32 = 6;

pub struct Prng(ChaCha8Rng);

impl Prng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn gaussian(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Standard complex Gaussian, `E|z|^2 = 1`.
    pub fn complex_gaussian(&mut self) -> Complex64 {
        let re = self.gaussian();
        let im = self.gaussian();
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// Uniform integer in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        ((self.uniform() * n as f64) as usize).min(n - 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StateKind {
    /// One Gaussian vector over every occupation with at most `N_max` photons.
    Pure,
    /// Independent rank-2 blocks per photon-number sector, mixed with random
    /// weights; no coherence between sectors.
    Mixed,
    /// Rank-3 Gram matrix over the full basis, so sectors are coherent.
    CrossCoherent,
}

impl StateKind {
    pub const ALL: [StateKind; 3] = [StateKind::Pure, StateKind::Mixed, StateKind::CrossCoherent];
}

fn gram(modes: usize, basis: &[OccupationVector], rank: usize, rng: &mut Prng) -> BeamState {
    let vectors: Vec<Vec<Complex64>> = (0..rank)
        .map(|_| basis.iter().map(|_| rng.complex_gaussian()).collect())
        .collect();
    let norm: f64 = vectors.iter().flatten().map(|z| z.norm_sqr()).sum();
    let mut terms = Vec::with_capacity(basis.len() * basis.len());
    for (i, m) in basis.iter().enumerate() {
        for (j, n) in basis.iter().enumerate() {
            let a: Complex64 = vectors.iter().map(|v| v[i] * v[j].conj()).sum::<Complex64>() / norm;
            terms.push((m.clone(), n.clone(), a));
        }
    }
    BeamState::from_terms(modes, terms).expect("basis vectors share the mode count")
}

/// Random `N`-photon state of the given rank.
pub fn random_fixed(modes: usize, n: u32, rank: usize, rng: &mut Prng) -> BeamState {
    gram(modes, &OccupationVector::with_total(modes, n), rank, rng)
}

/// Random state of the requested kind supported on at most `n_max` photons.
pub fn random_state_with(modes: usize, n_max: u32, kind: StateKind, rng: &mut Prng) -> BeamState {
    match kind {
        StateKind::Pure => gram(modes, &OccupationVector::up_to_total(modes, n_max), 1, rng),
        StateKind::CrossCoherent => gram(modes, &OccupationVector::up_to_total(modes, n_max), 3, rng),
        StateKind::Mixed => {
            let weights: Vec<f64> = (0..=n_max).map(|_| rng.uniform() + 0.05).collect();
            let total: f64 = weights.iter().sum();
            let blocks: Vec<BeamState> = (0..=n_max).map(|n| random_fixed(modes, n, 2, rng)).collect();
            BeamState::combine(modes, weights.iter().map(|w| w / total).zip(&blocks))
                .expect("blocks share the mode count")
        }
    }
}

/// Seeded entry point with the size limits of the test families.
pub fn random_state(modes: usize, n_max: u32, kind: StateKind, seed: u64) -> Result<BeamState, CliError> {
    if modes == 0 || modes > MAX_RANDOM_MODES {
        return Err(CliError::Usage {
            flag: "--modes".into(),
            message: format!("expected 1..={MAX_RANDOM_MODES}, found {modes}"),
        });
    }
    if n_max > MAX_RANDOM_PHOTONS {
        return Err(CliError::Usage {
            flag: "--max-photons".into(),
            message: format!("expected 0..={MAX_RANDOM_PHOTONS}, found {n_max}"),
        });
    }
    Ok(random_state_with(modes, n_max, kind, &mut Prng::new(seed)))
}

/// Mixture of two random fixed-photon-number sectors.
pub fn two_sector(modes: usize, n1: u32, n2: u32, rng: &mut Prng) -> BeamState {
    let p = 0.1 + 0.8 * rng.uniform();
    let a = random_fixed(modes, n1, 2, rng);
    let b = random_fixed(modes, n2, 2, rng);
    BeamState::combine(modes, [(p, &a), (1.0 - p, &b)]).expect("sectors share the mode count")
}

/// Unitary from the QR decomposition of a complex Gaussian matrix, with the
/// phases of `R`'s diagonal moved into `Q`.
pub fn random_unitary(modes: usize, rng: &mut Prng) -> ModeUnitary {
    let g = DMatrix::from_fn(modes, modes, |_, _| rng.complex_gaussian());
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..modes {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..modes {
            q[(i, j)] *= phase;
        }
    }
    let entries = (0..modes)
        .flat_map(|i| (0..modes).map(move |j| (i, j)))
        .map(|(i, j)| q[(i, j)])
        .collect();
    ModeUnitary::new(modes, entries).expect("QR factor is unitary")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::state_json;

    #[test]
    fn uniform_range_and_reproducibility() {
        let mut a = Prng::new(9);
        let mut b = Prng::new(9);
        for _ in 0..1000 {
            let x = a.uniform();
            assert!((0.0..1.0).contains(&x));
            assert_eq!(x, b.uniform());
        }
        let mean: f64 = (0..20000).map(|_| a.gaussian()).sum::<f64>() / 20000.0;
        assert!(mean.abs() < 0.05);
    }

    #[test]
    fn same_seed_same_bytes() {
        for kind in StateKind::ALL {
            let x = state_json(&random_state(2, 3, kind, 11).unwrap(), None);
            let y = state_json(&random_state(2, 3, kind, 11).unwrap(), None);
            assert_eq!(x, y);
            let z = state_json(&random_state(2, 3, kind, 12).unwrap(), None);
            assert_ne!(x, z);
        }
    }

    #[test]
    fn states_are_physical() {
        for (seed, kind) in StateKind::ALL.into_iter().enumerate() {
            let rho = random_state(3, 4, kind, seed as u64).unwrap();
            assert!((rho.trace() - 1.0).abs() < 1e-12);
            assert!(rho.is_hermitian(1e-14));
            assert!(crate::psd::min_eigenvalue(&rho) > -1e-12);
        }
        let pure = random_state(2, 2, StateKind::Pure, 0).unwrap();
        assert!((pure.purity() - 1.0).abs() < 1e-12);
        let mixed = random_state(1, 3, StateKind::Mixed, 7).unwrap();
        assert!((mixed.trace() - 1.0).abs() < 1e-12);
        assert!(mixed.sector_decompose().unwrap().cross_terms.is_empty());
        let cross = random_state(2, 3, StateKind::CrossCoherent, 7).unwrap();
        assert!(!cross.sector_decompose().unwrap().cross_terms.is_empty());
    }

    #[test]
    fn limits() {
        assert!(random_state(5, 1, StateKind::Pure, 0).is_err());
        assert!(random_state(0, 1, StateKind::Pure, 0).is_err());
        assert!(random_state(2, 7, StateKind::Pure, 0).is_err());
    }

    #[test]
    fn unitaries_are_unitary() {
        let mut rng = Prng::new(3);
        for d in 1..=4 {
            assert!(random_unitary(d, &mut rng).unitarity_error() < 1e-13);
        }
    }
}
