use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain violation in {op}: {detail}")]
    DomainViolation { op: &'static str, detail: String },

    #[error("division by the zero polynomial")]
    ZeroDivisor,

    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),

    #[error("transition matrix is not irreducible")]
    Reducible,

    #[error("pattern has {nodes} nodes, above the enumeration cap of {cap}")]
    CapExceeded { nodes: usize, cap: usize },

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("remainder of d_{k} modulo p_{k}^2 is nonzero")]
    NonzeroRemainder { k: u32 },

    #[error("certificate failed: {0}")]
    CertificateFailed(String),

    #[error("no convergence after {iterations} iterations: {detail}")]
    NotConverged { iterations: usize, detail: String },

    #[error("inconsistent results: {0}")]
    Inconsistent(String),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::DomainViolation {
            op,
            detail: detail.into(),
        }
    }
}
