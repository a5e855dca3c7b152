//! Photon subsets of multimode bosonic states.
//!
//! States are sparse operators on multimode Fock space ([`BeamState`]), keyed by
//! ket/bra occupation vectors. On top of that representation the crate provides:
//!
//! - mode-agnostic removal of photons from fixed and indefinite photon-number
//!   states ([`removal`]),
//! - normally ordered correlations `O_kl` and how they scale under removal
//!   ([`correlations`]),
//! - the state of `q` photons chosen at random from a beam, built both as a
//!   convex combination of reduced sectors and directly from order-`q`
//!   correlations ([`subset`]),
//! - uniform beam-splitter loss as a Kraus channel and as a mixture of photon
//!   removals ([`loss`]),
//! - passive linear optics through matrix permanents ([`linear_optics`]),
//! - a dense first-quantized partial trace used as an independent check
//!   ([`oracle`]),
//! - reduced-state purity, Stokes parameters and photon-number projectors
//!   ([`applications`]).
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod applications;
pub mod combinatorics;
pub mod correlations;
mod error;
pub mod fock;
pub mod linear_optics;
pub mod loss;
mod math;
pub mod oracle;
pub mod removal;
pub mod subset;

pub use error::{Error, Result};
pub use fock::{BeamState, KetBra, OccupationVector, SectorDecomposition, Side};

pub use num_complex::Complex64;

/// Amplitudes smaller than this are dropped after every operator application.
pub const PRUNE_EPSILON: f64 = 1e-14;

/// Default tolerance for Hermiticity checks.
pub const HERMITICITY_TOLERANCE: f64 = 1e-12;

/// Largest photon total allowed in a single occupation vector.
pub const MAX_PHOTONS: u32 = 64;
