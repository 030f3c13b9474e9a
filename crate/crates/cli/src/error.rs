use std::fmt;
use std::io;

use permwhite_core::ErrorKind;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_FORMAT: i32 = 4;
pub const EXIT_PRECONDITION: i32 = 5;
pub const EXIT_ENTROPY: i32 = 6;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io { context: String, source: io::Error },
    Core(permwhite_core::Error),
}

impl CliError {
    pub fn io(context: impl Into<String>, source: io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io { .. } => EXIT_IO,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Usage => EXIT_USAGE,
                ErrorKind::Io => EXIT_IO,
                ErrorKind::Format => EXIT_FORMAT,
                ErrorKind::Precondition => EXIT_PRECONDITION,
                ErrorKind::Entropy => EXIT_ENTROPY,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io { context, source } => write!(f, "{context}: {source}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<permwhite_core::Error> for CliError {
    fn from(e: permwhite_core::Error) -> Self {
        CliError::Core(e)
    }
}
