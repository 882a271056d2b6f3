use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown glyph '{glyph}' at position {position}")]
    UnknownGlyph { glyph: char, position: usize },

    #[error("parse error (line {line}): {message}")]
    Parse { line: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("structure error: {0}")]
    Structure(String),

    #[error("resource limit exceeded: {what} needs {count}, limit is {limit}")]
    Resource { what: String, count: u128, limit: u128 },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("i/o error: {0}")]
    Io(String),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Data,
    Resource,
}

impl Error {
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub fn resource(what: impl Into<String>, count: u128, limit: u128) -> Self {
        Error::Resource {
            what: what.into(),
            count,
            limit,
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidArgument(_) => ErrorClass::Usage,
            Error::Resource { .. } => ErrorClass::Resource,
            _ => ErrorClass::Data,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
