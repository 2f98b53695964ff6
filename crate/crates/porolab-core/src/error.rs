use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, PoroError>;

#[derive(Debug, Clone, PartialEq)]
pub enum PoroError {
    InvalidArgument(String),
    Unsupported(String),
    /// A construction could not find enough candidates; the message names the node.
    ConstructionFailure(String),
    /// A hole search or certificate failed where the input promised success.
    CertificateViolation(String),
    CertificateMissing(String),
}

impl fmt::Display for PoroError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PoroError::InvalidArgument(m) => write!(f, "invalid argument: {m}"),
            PoroError::Unsupported(m) => write!(f, "unsupported: {m}"),
            PoroError::ConstructionFailure(m) => write!(f, "construction failure: {m}"),
            PoroError::CertificateViolation(m) => write!(f, "certificate violation: {m}"),
            PoroError::CertificateMissing(m) => write!(f, "certificate missing: {m}"),
        }
    }
}

impl core::error::Error for PoroError {}

pub(crate) fn invalid(msg: impl Into<String>) -> PoroError {
    PoroError::InvalidArgument(msg.into())
}
