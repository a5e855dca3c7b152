//! File formats, seeded test families, verification suites and the
//! command-line front end for `photon-subset`.

pub mod cli;
pub mod io;
pub mod psd;
pub mod random;
pub mod verify;

pub use cli::run;

/// Everything that makes the command line exit with status 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid value for {flag}: {message}")]
    Usage { flag: String, message: String },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Library(#[from] photon_subset::Error),
}
