//! JSON documents for states, unitaries and run reports.
//!
//! Every float is written with 17 significant digits so a save/load round
//! trip is bit exact.

use std::io;
use std::path::Path;

use num_complex::Complex64;
use photon_subset::linear_optics::ModeUnitary;
use photon_subset::{BeamState, OccupationVector};
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, Serializer};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Hermiticity tolerance used by the loader unless overridden.
pub const TOLERANCE_ENV: &str = "PHOTON_SUBSET_TOL";

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermDocument {
    pub ket: Vec<u32>,
    pub bra: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StateDocument {
    pub modes: usize,
    pub terms: Vec<TermDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Value>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct UnitaryDocument {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

/// What the loader found besides the state itself.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoadReport {
    pub trace: f64,
    pub hermitian_error: f64,
}

/// Writes floats as `{:.16e}`.
#[derive(Clone, Copy, Debug, Default)]
pub struct FullPrecision;

impl Formatter for FullPrecision {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serializes with [`FullPrecision`] and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, FullPrecision);
    value.serialize(&mut ser).expect("serializing to memory");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

/// Default Hermiticity tolerance, honouring the environment override.
pub fn default_tolerance() -> Result<f64, CliError> {
    match std::env::var(TOLERANCE_ENV) {
        Ok(raw) => raw
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|t| t.is_finite() && *t >= 0.0)
            .ok_or_else(|| CliError::Usage {
                flag: TOLERANCE_ENV.into(),
                message: format!("expected a non-negative number, found {raw:?}"),
            }),
        Err(_) => Ok(photon_subset::HERMITICITY_TOLERANCE),
    }
}

pub fn state_document(state: &BeamState, metadata: Option<Value>) -> StateDocument {
    StateDocument {
        modes: state.modes(),
        terms: state
            .terms()
            .map(|(key, a)| TermDocument {
                ket: key.ket.as_slice().to_vec(),
                bra: key.bra.as_slice().to_vec(),
                re: a.re,
                im: a.im,
            })
            .collect(),
        metadata,
    }
}

/// Builds the state and checks mode counts and Hermiticity. Metadata is ignored.
pub fn state_from_document(doc: &StateDocument, tolerance: f64) -> Result<(BeamState, LoadReport), CliError> {
    for (i, t) in doc.terms.iter().enumerate() {
        if t.ket.len() != doc.modes || t.bra.len() != doc.modes {
            return Err(CliError::Input(format!(
                "term {i} has {} ket and {} bra occupations for a {}-mode state",
                t.ket.len(),
                t.bra.len(),
                doc.modes
            )));
        }
        if !t.re.is_finite() || !t.im.is_finite() {
            return Err(CliError::Input(format!("term {i} has a non-finite amplitude")));
        }
    }
    let terms = doc
        .terms
        .iter()
        .map(|t| {
            Ok((
                OccupationVector::from_slice(&t.ket)?,
                OccupationVector::from_slice(&t.bra)?,
                Complex64::new(t.re, t.im),
            ))
        })
        .collect::<Result<Vec<_>, photon_subset::Error>>()?;
    let state = BeamState::from_terms(doc.modes, terms)?;
    let hermitian_error = state.hermitian_error();
    if hermitian_error > tolerance {
        return Err(photon_subset::Error::NonHermitianState {
            error: hermitian_error,
            tolerance,
        }
        .into());
    }
    let report = LoadReport {
        trace: state.trace(),
        hermitian_error,
    };
    Ok((state, report))
}

pub fn parse_state(text: &str, tolerance: f64) -> Result<(BeamState, LoadReport), CliError> {
    let doc: StateDocument = serde_json::from_str(text).map_err(|e| CliError::Input(format!("state JSON: {e}")))?;
    state_from_document(&doc, tolerance)
}

pub fn state_json(state: &BeamState, metadata: Option<Value>) -> String {
    to_json(&state_document(state, metadata))
}

pub fn parse_unitary(text: &str) -> Result<ModeUnitary, CliError> {
    let doc: UnitaryDocument = serde_json::from_str(text).map_err(|e| CliError::Input(format!("unitary JSON: {e}")))?;
    let d = doc.re.len();
    if doc.im.len() != d || doc.re.iter().chain(&doc.im).any(|row| row.len() != d) {
        return Err(CliError::Input(format!(
            "unitary must have square re and im parts of equal size; re has {d} rows"
        )));
    }
    let rows: Vec<Vec<Complex64>> = doc
        .re
        .iter()
        .zip(&doc.im)
        .map(|(re, im)| re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect())
        .collect();
    Ok(ModeUnitary::from_rows(&rows)?)
}

pub fn unitary_json(u: &ModeUnitary) -> String {
    let d = u.modes();
    let part = |f: fn(Complex64) -> f64| (0..d).map(|i| (0..d).map(|j| f(u.entry(i, j))).collect()).collect();
    to_json(&UnitaryDocument {
        re: part(|z| z.re),
        im: part(|z| z.im),
    })
}

/// Reads a file and returns its contents with their SHA-256 digest.
pub fn read_with_digest(path: &Path) -> Result<(String, String), CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let digest = Sha256::digest(&bytes);
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    let text = String::from_utf8(bytes).map_err(|_| CliError::Input(format!("{} is not UTF-8", path.display())))?;
    Ok((text, hex))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> BeamState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let amps = [
            (OccupationVector::from_slice(&[2, 0]).unwrap(), Complex64::new(h, 0.0)),
            (
                OccupationVector::from_slice(&[0, 1]).unwrap(),
                Complex64::new(0.1, -h * 0.3),
            ),
        ];
        BeamState::pure(2, amps).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let rho = sample();
        let text = state_json(&rho, None);
        let (back, report) = parse_state(&text, 1e-12).unwrap();
        assert_eq!(back, rho);
        assert_eq!(state_json(&back, None), text);
        assert!((report.trace - rho.trace()).abs() == 0.0);
    }

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(to_json(&0.1f64).trim(), "1.0000000000000001e-1");
        assert_eq!(to_json(&1.0f64).trim(), "1.0000000000000000e0");
    }

    #[test]
    fn metadata_is_ignored() {
        let text = r#"{"modes":1,"terms":[{"ket":[1],"bra":[1],"re":1,"im":0}],"metadata":{"removed":3}}"#;
        let (rho, report) = parse_state(text, 1e-12).unwrap();
        assert_eq!(rho.len(), 1);
        assert_eq!(report.trace, 1.0);
    }

    #[test]
    fn loader_rejects_bad_states() {
        let wrong_modes = r#"{"modes":2,"terms":[{"ket":[1],"bra":[1],"re":1,"im":0}]}"#;
        assert!(matches!(parse_state(wrong_modes, 1e-12), Err(CliError::Input(_))));
        let skew = r#"{"modes":1,"terms":[{"ket":[1],"bra":[0],"re":1,"im":0}]}"#;
        assert!(matches!(
            parse_state(skew, 1e-12),
            Err(CliError::Library(photon_subset::Error::NonHermitianState { .. }))
        ));
        assert!(parse_state("{", 1e-12).is_err());
    }

    #[test]
    fn unitary_round_trip() {
        let u = ModeUnitary::balanced_beam_splitter();
        assert_eq!(parse_unitary(&unitary_json(&u)).unwrap(), u);
        assert!(parse_unitary(r#"{"re":[[1,1],[0,1]],"im":[[0,0],[0,0]]}"#).is_err());
        assert!(parse_unitary(r#"{"re":[[1,0]],"im":[[0,0]]}"#).is_err());
    }
}
