use std::path::PathBuf;

use treeshift::counts::ExactCap;
use treeshift::{Error, TransitionMatrix};

use crate::output::Format;

/// Settings shared by every subcommand.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub precision_bits: u32,
    pub exact_depth_cap: u32,
    pub output_format: Format,
    pub matrix_path: Option<PathBuf>,
    pub seed: u64,
    pub log2: bool,
}

impl RunConfig {
    pub fn cap(&self) -> ExactCap {
        ExactCap {
            max_level: i64::from(self.exact_depth_cap),
            ..ExactCap::default()
        }
    }

    /// The matrix from `--matrix`, or `None` for the golden-mean shift.
    pub fn matrix(&self) -> Result<Option<TransitionMatrix>, CliError> {
        self.matrix_path
            .as_deref()
            .map(TransitionMatrix::from_file)
            .transpose()
            .map_err(CliError::from)
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Verification(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) | CliError::Io(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_)
            | Error::DomainViolation { .. }
            | Error::MalformedMatrix(_)
            | Error::Reducible
            | Error::CapExceeded { .. } => CliError::Usage(e.to_string()),
            Error::ZeroDivisor
            | Error::Inconclusive(_)
            | Error::NonzeroRemainder { .. }
            | Error::CertificateFailed(_)
            | Error::NotConverged { .. }
            | Error::Inconsistent(_) => CliError::Verification(e.to_string()),
        }
    }
}
