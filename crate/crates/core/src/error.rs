use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
#[non_exhaustive]
pub enum Error {
    #[error("state is not Hermitian: max |a_mn - conj(a_nm)| = {error:e} exceeds {tolerance:e}")]
    NonHermitianState { error: f64, tolerance: f64 },
    #[error("mode {mode} out of range for a {modes}-mode state")]
    ModeOutOfRange { mode: usize, modes: usize },
    #[error("mode count mismatch: expected {expected}, found {found}")]
    ModeMismatch { expected: usize, found: usize },
    #[error("state has zero trace")]
    ZeroTrace,
    #[error("occupation total {total} exceeds the cap of {cap} photons")]
    TooManyPhotonsInTerm { total: u32, cap: u32 },
    #[error("a state needs at least one mode")]
    NoModes,
    #[error("term has |ket| = {ket}, |bra| = {bra}; expected both equal to {expected}")]
    NotFixedN { expected: u32, ket: u32, bra: u32 },
    #[error("cannot remove a photon from the vacuum sector")]
    EmptyState,
    #[error("subset size {q} is not in 0..={photons}")]
    BadSubsetSize { q: i64, photons: u32 },
    #[error("correlation index is unbalanced: |k| = {creators}, |l| = {annihilators}")]
    UnbalancedIndex { creators: u32, annihilators: u32 },
    #[error("no {q}-photon events are possible: normalization N({q}) = 0")]
    DegenerateNormalization { q: u32 },
    #[error("sector with {photons} photons has weight {weight:e} but non-zero coherences")]
    NonPhysicalSector { photons: u32, weight: f64 },
    #[error("transmission {0} is outside the supported range")]
    BadEta(f64),
    #[error("matrix of side {side} exceeds the permanent limit of {limit}")]
    TooLarge { side: usize, limit: usize },
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not unitary: max |U U^dagger - I| = {error:e}")]
    NonUnitary { error: f64 },
    #[error("state has {photons} photons; linear optics is limited to {limit}")]
    TooManyPhotons { photons: u32, limit: u32 },
    #[error("operator is not permutation symmetric: residual {error:e}")]
    NotSymmetric { error: f64 },
    #[error("first-quantized dimension {dimension} exceeds the cap of {cap}")]
    DimensionCap { dimension: usize, cap: usize },
    #[error("cannot trace a slot out of a zero-photon tensor")]
    EmptyTensor,
    #[error("state is not pure: |Tr(rho^2) - Tr(rho)^2| = {error:e}")]
    NotPure { error: f64 },
    #[error("operation needs {expected} modes, state has {found}")]
    WrongModeCount { expected: usize, found: usize },
    #[error("mean photon number in mode {mode} is zero")]
    ZeroIntensity { mode: usize },
}
