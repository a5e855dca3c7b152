//! Seeded property suites, one per checked identity.
//!
//! Every suite draws from its own generator, derived from the run seed and
//! the suite name, so suites can run alone or together with identical
//! results.

use std::time::Instant;

use clap::ValueEnum;
use num_complex::Complex64;
use photon_subset::applications::{
    bloch_of_random_photon, projector_expectation_series, reduced_purity_direct, reduced_purity_formula, stokes,
};
use photon_subset::correlations::{expectation, scaling_general_many, CorrelationIndex};
use photon_subset::linear_optics::{apply_unitary, fock_amplitude, ModeUnitary};
use photon_subset::loss::{
    loss_commutes_with_network, loss_fixed_n_decomposition, loss_general_decomposition, loss_kraus, Transmission,
};
use photon_subset::oracle::remove_one_by_oracle;
use photon_subset::removal::{remove_one_fixed_n, remove_one_general};
use photon_subset::subset::{random_subset, reconstruct_order, uniqueness_counterexample, SubsetMethod};
use photon_subset::{BeamState, OccupationVector};
use serde::Serialize;

use crate::psd::min_eigenvalue;
use crate::random::{random_fixed, random_state_with, random_unitary, two_sector, Prng, StateKind};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_ETAS: [f64; 3] = [0.3, 0.5, 0.9];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Suite {
    /// Photon removal against the first-quantized partial trace.
    Oracle,
    /// Correlation scaling under removal at fixed photon number.
    Eq8,
    /// Correlation scaling under removal for arbitrary states.
    Eq9,
    /// Subset reinterpretation of correlations is unique to q = |l|.
    Eq13,
    /// Direct and convex constructions of the q-photon subset state.
    Eq14,
    /// Correlations rebuilt from the |l|-photon subset state.
    Eq16,
    /// Loss as Kraus channel and as a mixture of photon removals.
    #[value(alias = "loss")]
    Eq17,
    /// Removal and loss commute with passive linear optics.
    Commutation,
    /// Reduced-state purity from correlations.
    Purity,
    /// Bloch vector of a random photon against the Stokes vector.
    Stokes,
    /// Photon-number projector series.
    Projector,
    /// Every suite above.
    All,
}

impl Suite {
    pub const EACH: [Suite; 11] = [
        Suite::Oracle,
        Suite::Eq8,
        Suite::Eq9,
        Suite::Eq14,
        Suite::Eq16,
        Suite::Eq13,
        Suite::Eq17,
        Suite::Commutation,
        Suite::Purity,
        Suite::Stokes,
        Suite::Projector,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Oracle => "oracle",
            Suite::Eq8 => "eq8",
            Suite::Eq9 => "eq9",
            Suite::Eq13 => "eq13",
            Suite::Eq14 => "eq14",
            Suite::Eq16 => "eq16",
            Suite::Eq17 => "eq17",
            Suite::Commutation => "commutation",
            Suite::Purity => "purity",
            Suite::Stokes => "stokes",
            Suite::Projector => "projector",
            Suite::All => "all",
        }
    }

    fn salt(self) -> u64 {
        self.name().bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
            (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3)
        })
    }
}

/// Whether a check passes when its value stays at or below the tolerance, or
/// when it exceeds it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    Exceeds,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, max_error: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            max_error,
            tolerance,
            bound: Bound::AtMost,
            pass: max_error <= tolerance,
        }
    }

    pub fn exceeds(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            max_error: value,
            tolerance: threshold,
            bound: Bound::Exceeds,
            pass: value > threshold,
        }
    }

    fn with_tolerance(mut self, tolerance: f64) -> Self {
        if self.bound == Bound::AtMost {
            self.tolerance = tolerance;
            self.pass = self.max_error <= tolerance;
        }
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Restricts loss suites to one transmission.
    pub eta: Option<f64>,
    /// Restricts the uniqueness search to one subset size.
    pub q: Option<u32>,
    /// Replaces the tolerance of every at-most check.
    pub tolerance: Option<f64>,
}

impl VerifyOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

type SuiteResult = photon_subset::Result<Vec<Check>>;

/// Runs one suite, or every suite for [`Suite::All`].
pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> SuiteResult {
    let start = Instant::now();
    let mut checks = match suite {
        Suite::All => {
            let mut all = Vec::new();
            for s in Suite::EACH {
                all.extend(run_suite(s, opts)?);
            }
            all.push(Check::at_most(
                "all: wall time (s)",
                start.elapsed().as_secs_f64(),
                60.0,
            ));
            return Ok(all);
        }
        Suite::Oracle => oracle(opts, start)?,
        Suite::Eq8 => eq8(opts)?,
        Suite::Eq9 => eq9(opts)?,
        Suite::Eq13 => eq13(opts)?,
        Suite::Eq14 => eq14(opts)?,
        Suite::Eq16 => eq16(opts)?,
        Suite::Eq17 => eq17(opts)?,
        Suite::Commutation => commutation(opts)?,
        Suite::Purity => purity(opts)?,
        Suite::Stokes => stokes_bloch(opts)?,
        Suite::Projector => projector(opts)?,
    };
    if let Some(t) = opts.tolerance {
        checks = checks
            .into_iter()
            .map(|c| {
                if c.name.ends_with("(s)") {
                    c
                } else {
                    c.with_tolerance(t)
                }
            })
            .collect();
    }
    Ok(checks)
}

fn rng_for(suite: Suite, opts: &VerifyOptions) -> Prng {
    Prng::new(opts.seed ^ suite.salt())
}

/// Member `i` of the shared random family: `d` in 1..=3, `N_max` in 1..=6,
/// cycling through all 18 pairs.
fn family(i: usize) -> (usize, u32) {
    (1 + i % 3, 1 + ((i / 3) % 6) as u32)
}

fn family_kind(i: usize) -> StateKind {
    StateKind::ALL[(i / 18) % 3]
}

fn diff(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm()
}

fn oracle(opts: &VerifyOptions, start: Instant) -> SuiteResult {
    let mut rng = rng_for(Suite::Oracle, opts);
    let (mut basis_err, mut random_err) = (0.0f64, 0.0f64);
    for d in 1..=3 {
        for n in 1..=5 {
            let basis = OccupationVector::with_total(d, n);
            for m in &basis {
                for k in &basis {
                    let rho = BeamState::ket_bra(m.clone(), k.clone(), Complex64::new(1.0, 0.0))?;
                    let err = remove_one_by_oracle(&rho, n, 0)?.max_abs_diff(&remove_one_fixed_n(&rho, n)?);
                    basis_err = basis_err.max(err);
                }
            }
            for _ in 0..50 {
                let psi = random_fixed(d, n, 1, &mut rng);
                let err = remove_one_by_oracle(&psi, n, 0)?.max_abs_diff(&remove_one_fixed_n(&psi, n)?);
                random_err = random_err.max(err);
            }
        }
    }
    Ok(vec![
        Check::at_most("oracle: basis ket-bras, d<=3, N<=5", basis_err, 1e-10),
        Check::at_most("oracle: 50 random pure states per (d, N)", random_err, 1e-10),
        Check::at_most("oracle: wall time (s)", start.elapsed().as_secs_f64(), 10.0),
    ])
}

fn eq8(opts: &VerifyOptions) -> SuiteResult {
    let mut rng = rng_for(Suite::Eq8, opts);
    let mut err = 0.0f64;
    for i in 0..100 {
        let (d, n) = family(i);
        let rho = random_fixed(d, n, 2, &mut rng);
        let reduced = remove_one_fixed_n(&rho, n)?;
        for order in 0..=n {
            let factor = f64::from(n - order) / f64::from(n);
            for idx in CorrelationIndex::balanced(d, order) {
                err = err.max(diff(expectation(&reduced, &idx)?, expectation(&rho, &idx)? * factor));
            }
        }
    }
    Ok(vec![Check::at_most(
        "eq8: fixed-N scaling, 100 states, all balanced |l| <= N <= 6",
        err,
        1e-11,
    )])
}

fn all_indices(d: usize, n_max: u32) -> Vec<CorrelationIndex> {
    let vectors = OccupationVector::up_to_total(d, n_max);
    let mut out = Vec::with_capacity(vectors.len() * vectors.len());
    for k in &vectors {
        for l in &vectors {
            out.push(CorrelationIndex::new(k.clone(), l.clone()).expect("same mode count"));
        }
    }
    out
}

fn eq9(opts: &VerifyOptions) -> SuiteResult {
    let mut rng = rng_for(Suite::Eq9, opts);
    let mut err = 0.0f64;
    for i in 0..100 {
        let (d, n_max) = family(i);
        let rho = random_state_with(d, n_max, StateKind::CrossCoherent, &mut rng);
        for s in scaling_general_many(&rho, &all_indices(d, n_max))? {
            err = err.max(s.max_deviation());
        }
    }
    Ok(vec![Check::at_most(
        "eq9: all forms and cross-term factor, 100 cross-coherent states",
        err,
        1e-12,
    )])
}

fn eq13(opts: &VerifyOptions) -> SuiteResult {
    const N_MAX: u32 = 6;
    let mut rng = rng_for(Suite::Eq13, opts);
    let mut at_l = 0.0f64;
    let mut weakest = f64::INFINITY;
    for order in 0..N_MAX {
        let indices = CorrelationIndex::balanced(2, order);
        for q in order..=N_MAX {
            if opts.q.is_some_and(|only| only != q) {
                continue;
            }
            let mut found = 0.0f64;
            for _ in 0..100 {
                let n1 = rng.below(N_MAX as usize + 1) as u32;
                let n2 = (n1 + 1 + rng.below(N_MAX as usize) as u32) % (N_MAX + 1);
                let rho = two_sector(2, n1, n2, &mut rng);
                for idx in &indices {
                    let (claimed, actual) = uniqueness_counterexample(&rho, idx, q)?;
                    found = found.max(diff(claimed, actual));
                }
            }
            if q == order {
                at_l = at_l.max(found);
            } else {
                weakest = weakest.min(found);
            }
        }
    }
    let mut checks = vec![Check::at_most("eq13: no violation at q = |l|", at_l, 1e-10)];
    if weakest.is_finite() {
        checks.push(Check::exceeds(
            "eq13: violation found for every q > |l| (weakest)",
            weakest,
            1e-6,
        ));
    }
    Ok(checks)
}

fn eq14(opts: &VerifyOptions) -> SuiteResult {
    let mut rng = rng_for(Suite::Eq14, opts);
    let (mut err, mut negativity) = (0.0f64, 0.0f64);
    for i in 0..100 {
        let (d, n_max) = family(i);
        let rho = random_state_with(d, n_max, family_kind(i), &mut rng);
        for q in 1..=n_max {
            let direct = random_subset(&rho, q, SubsetMethod::Direct)?;
            let convex = random_subset(&rho, q, SubsetMethod::Convex)?;
            err = err.max(direct.max_abs_diff(&convex));
            negativity = negativity.max(-min_eigenvalue(&direct));
        }
    }
    Ok(vec![
        Check::at_most(
            "eq14: direct and convex subset states, 100 states, 1 <= q <= N_max",
            err,
            1e-10,
        ),
        Check::at_most("eq14: subset states are PSD (-min eigenvalue)", negativity, 1e-10),
    ])
}

fn eq16(opts: &VerifyOptions) -> SuiteResult {
    let mut rng = rng_for(Suite::Eq16, opts);
    let mut err = 0.0f64;
    for i in 0..100 {
        let (d, n_max) = family(i);
        let rho = random_state_with(d, n_max, family_kind(i), &mut rng);
        for q in 0..=n_max {
            for (_, direct, via) in reconstruct_order(&rho, q)? {
                err = err.max(diff(direct, via));
            }
        }
    }
    Ok(vec![Check::at_most(
        "eq16: correlations rebuilt from subset states, all |l| <= N_max",
        err,
        1e-10,
    )])
}

fn etas(opts: &VerifyOptions) -> photon_subset::Result<Vec<Transmission>> {
    match opts.eta {
        Some(eta) => Ok(vec![Transmission::new(eta)?]),
        None => DEFAULT_ETAS.iter().map(|&e| Transmission::new(e)).collect(),
    }
}

fn eq17(opts: &VerifyOptions) -> SuiteResult {
    let mut rng = rng_for(Suite::Eq17, opts);
    let etas = etas(opts)?;
    let (mut general, mut fixed, mut semigroup) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..36 {
        let (d, n_max) = family(i);
        let rho = random_state_with(d, n_max, family_kind(i), &mut rng);
        let rho_n = random_fixed(d, n_max, 2, &mut rng);
        for &eta in &etas {
            let kraus = loss_kraus(&rho, eta);
            general = general.max(kraus.max_abs_diff(&loss_general_decomposition(&rho, eta)?));
            let kraus_n = loss_kraus(&rho_n, eta);
            fixed = fixed.max(kraus_n.max_abs_diff(&loss_fixed_n_decomposition(&rho_n, n_max, eta)?));
            for &other in &etas {
                let twice = loss_kraus(&kraus, other);
                let once = loss_kraus(&rho, Transmission::new(eta.value() * other.value())?);
                semigroup = semigroup.max(twice.max_abs_diff(&once));
            }
        }
    }
    Ok(vec![
        Check::at_most("eq17: Kraus vs general decomposition", general, 1e-10),
        Check::at_most("eq17: Kraus vs fixed-N decomposition", fixed, 1e-10),
        Check::at_most("eq17: semigroup composition", semigroup, 1e-10),
    ])
}

fn commutation(opts: &VerifyOptions) -> SuiteResult {
    let mut rng = rng_for(Suite::Commutation, opts);
    let eta = Transmission::new(opts.eta.unwrap_or(0.7))?;
    let (mut removal, mut loss) = (0.0f64, 0.0f64);
    for i in 0..20 {
        let d = 1 + i % 3;
        let n_max = 1 + ((i / 3) % 4) as u32;
        let rho = random_state_with(d, n_max, StateKind::ALL[i % 3], &mut rng);
        let u = random_unitary(d, &mut rng);
        let a = remove_one_general(&apply_unitary(&rho, &u)?).state;
        let b = apply_unitary(&remove_one_general(&rho).state, &u)?;
        removal = removal.max(a.max_abs_diff(&b));
        let (a, b) = loss_commutes_with_network(&rho, eta, &u)?;
        loss = loss.max(a.max_abs_diff(&b));
    }
    let one_one = OccupationVector::from_slice(&[1, 1])?;
    let hom = fock_amplitude(&ModeUnitary::balanced_beam_splitter(), &one_one, &one_one)?.norm();
    Ok(vec![
        Check::at_most("commutation: removal with 20 random networks", removal, 1e-9),
        Check::at_most("commutation: loss with 20 random networks", loss, 1e-9),
        Check::at_most("commutation: HOM coincidence amplitude", hom, 1e-12),
    ])
}

fn purity(opts: &VerifyOptions) -> SuiteResult {
    let mut rng = rng_for(Suite::Purity, opts);
    let mut err = 0.0f64;
    for d in 1..=3 {
        for n in 0..=5 {
            for _ in 0..5 {
                let psi = random_fixed(d, n, 1, &mut rng);
                for q in 0..=n {
                    err = err.max((reduced_purity_formula(&psi, n, q)? - reduced_purity_direct(&psi, n, q)?).abs());
                }
            }
        }
    }
    let one_one = BeamState::fock(OccupationVector::from_slice(&[1, 1])?)?;
    let half = (reduced_purity_formula(&one_one, 2, 1)? - 0.5).abs();
    let mut coherent = 0.0f64;
    for n in 0..=6 {
        let spin = BeamState::fock(OccupationVector::from_slice(&[n, 0])?)?;
        for q in 0..=n {
            coherent = coherent.max((reduced_purity_formula(&spin, n, q)? - 1.0).abs());
        }
    }
    Ok(vec![
        Check::at_most("purity: formula vs Tr(sigma^2), d<=3, N<=5, all q", err, 1e-10),
        Check::at_most("purity: |1,1>, q=1 is 1/2", half, 0.0),
        Check::at_most("purity: |N,0> stays pure for all q", coherent, 1e-12),
    ])
}

fn stokes_bloch(opts: &VerifyOptions) -> SuiteResult {
    let mut rng = rng_for(Suite::Stokes, opts);
    let mut err = 0.0f64;
    for i in 0..100 {
        let n_max = 1 + (i % 6) as u32;
        let rho = random_state_with(2, n_max, StateKind::ALL[(i / 6) % 3], &mut rng);
        let s = stokes(&rho)?
            .normalized()
            .ok_or(photon_subset::Error::DegenerateNormalization { q: 1 })?;
        let b = bloch_of_random_photon(&rho)?;
        for (x, y) in s.iter().zip(&b) {
            err = err.max((x - y).abs());
        }
    }
    Ok(vec![Check::at_most(
        "stokes: Bloch vector of one photon vs normalized Stokes, 100 states",
        err,
        1e-11,
    )])
}

fn projector(opts: &VerifyOptions) -> SuiteResult {
    let mut rng = rng_for(Suite::Projector, opts);
    let mut err = 0.0f64;
    for i in 0..50 {
        let n_max = 1 + (i % 6) as u32;
        let rho = random_state_with(1, n_max, StateKind::ALL[(i / 6) % 3], &mut rng);
        for m in 0..=n_max {
            let p = projector_expectation_series(&rho, m)?;
            err = err.max((p.series - p.direct).abs());
        }
    }
    Ok(vec![Check::at_most(
        "projector: series vs <m|rho|m>, 50 single-mode states",
        err,
        1e-10,
    )])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_override_skips_thresholds() {
        let c = Check::exceeds("x", 1e-3, 1e-6).with_tolerance(1.0);
        assert!(c.pass && c.tolerance == 1e-6);
        let c = Check::at_most("y", 1e-3, 1e-6).with_tolerance(1e-2);
        assert!(c.pass && c.tolerance == 1e-2);
    }

    #[test]
    fn family_covers_every_pair() {
        let mut seen: Vec<(usize, u32)> = (0..18).map(family).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 18);
    }

    #[test]
    fn suites_are_reproducible() {
        let opts = VerifyOptions::with_seed(5);
        assert_eq!(
            run_suite(Suite::Projector, &opts).unwrap(),
            run_suite(Suite::Projector, &opts).unwrap()
        );
    }
}
