use std::io;

use thiserror::Error;

/// Broad failure classes, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad arguments or violated call contracts.
    Usage,
    Io,
    /// A persisted file (pool, trace, report) is malformed or corrupted.
    Format,
    /// Input does not meet a statistical test's minimum length.
    Precondition,
    /// The entropy source could not supply bytes.
    Entropy,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("n_qubits must be between 1 and {max}, got {got}")]
    SizeLimit { got: u32, max: u32 },

    #[error("not a permutation: {0}")]
    NotBijection(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid range [{lo}, {hi}]")]
    InvalidRange { lo: u64, hi: u64 },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("seed file exhausted after {consumed} bytes")]
    SourceExhausted { consumed: u64 },

    #[error("entropy source failure: {0}")]
    Source(String),

    #[error("bad magic: expected {expected:?}")]
    BadMagic { expected: &'static str },

    #[error("unsupported format version {0}")]
    UnsupportedVersion(u16),

    #[error("truncated file: {0}")]
    Truncated(&'static str),

    #[error("checksum mismatch in {0}")]
    Checksum(String),

    #[error("corrupt file: {0}")]
    Corrupt(String),

    #[error("selection trace covers {trace} chunks but input has {input}")]
    TraceLength { trace: u64, input: u64 },

    #[error("pool index {index} out of range for pool of {count}")]
    PoolIndex { index: u32, count: usize },

    #[error("input too short: need at least {needed} {unit}, got {got}")]
    TooShort {
        needed: u64,
        got: u64,
        unit: &'static str,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::SizeLimit { .. }
            | Error::NotBijection(_)
            | Error::LengthMismatch { .. }
            | Error::InvalidRange { .. }
            | Error::InvalidArgument(_)
            | Error::TraceLength { .. }
            | Error::PoolIndex { .. } => ErrorKind::Usage,
            Error::SourceExhausted { .. } | Error::Source(_) => ErrorKind::Entropy,
            Error::BadMagic { .. }
            | Error::UnsupportedVersion(_)
            | Error::Truncated(_)
            | Error::Checksum(_)
            | Error::Corrupt(_) => ErrorKind::Format,
            Error::TooShort { .. } => ErrorKind::Precondition,
            Error::Io(_) => ErrorKind::Io,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
