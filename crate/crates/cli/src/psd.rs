//! Positivity checks through dense Hermitian eigenvalues.

use nalgebra::DMatrix;
use num_complex::Complex64;
use photon_subset::{BeamState, OccupationVector};

/// Smallest eigenvalue of the state as a dense matrix over every occupation
/// vector it mentions. The zero operator gives `0`.
pub fn min_eigenvalue(rho: &BeamState) -> f64 {
    let mut basis: Vec<&OccupationVector> = rho.terms().flat_map(|(key, _)| [&key.ket, &key.bra]).collect();
    basis.sort();
    basis.dedup();
    if basis.is_empty() {
        return 0.0;
    }
    let index = |v: &OccupationVector| basis.binary_search(&v).expect("collected above");
    let mut m = DMatrix::<Complex64>::zeros(basis.len(), basis.len());
    for (key, a) in rho.terms() {
        m[(index(&key.ket), index(&key.bra))] = a;
    }
    // symmetrize so round-off in the input cannot leak into the spectrum
    let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn occ(v: &[u32]) -> OccupationVector {
        OccupationVector::from_slice(v).unwrap()
    }

    #[test]
    fn eigenvalue_examples() {
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(min_eigenvalue(&BeamState::zero(1).unwrap()), 0.0);
        let coherence = BeamState::from_terms(1, [(occ(&[0]), occ(&[1]), one), (occ(&[1]), occ(&[0]), one)]).unwrap();
        assert!((min_eigenvalue(&coherence) + 1.0).abs() < 1e-14);
        let fock = BeamState::fock(occ(&[2, 1])).unwrap();
        assert!((min_eigenvalue(&fock) - 1.0).abs() < 1e-14);
    }
}
