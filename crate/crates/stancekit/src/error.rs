//! Crate-wide error type.
//!
//! Every fallible operation in the crate returns [`Result`]. Display
//! implementations are single-line so binary front ends can print them as
//! one machine-parseable diagnostic.

use std::path::PathBuf;

use thiserror::Error;

/// Alias used by every fallible function in the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All error conditions surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Underlying filesystem failure, annotated with the path involved.
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A line in a line-oriented file did not match the expected format.
    #[error("{path}:{line}: {message}")]
    MalformedLine {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// The same tweet id appeared more than once where ids must be unique.
    #[error("duplicate tweet id: {id}")]
    DuplicateId { id: String },

    /// A stored dependency parse block violated its structural invariants.
    #[error("invalid parse for tweet {id}: {message}")]
    InvalidParse { id: String, message: String },

    /// A stance label string was not FAVOR, AGAINST, or NONE.
    #[error("unknown stance label: {value}")]
    UnknownLabel { value: String },

    /// An operation that needs dictionary words was given an empty dictionary.
    #[error("dictionary is empty")]
    EmptyDictionary,

    /// A feature family needs a resource that was not configured or loaded.
    #[error("missing resource for {what}: {detail}")]
    MissingResource { what: String, detail: String },

    /// Class balancing could not fill a class to the required size.
    #[error("not enough {label} examples: need {needed}, have {available}")]
    ClassDeficit {
        label: String,
        needed: usize,
        available: usize,
    },

    /// Training requires at least two distinct stance labels.
    #[error("training set has {found} distinct label(s); need at least 2")]
    TooFewClasses { found: usize },

    /// An operation received an empty collection it cannot work with.
    #[error("empty input: {what}")]
    EmptyInput { what: String },

    /// Two parallel sequences had different lengths.
    #[error("length mismatch: {left} predictions vs {right} gold labels")]
    LengthMismatch { left: usize, right: usize },

    /// A feature family name in configuration or CLI input was not recognized.
    #[error("unknown feature family: {name}")]
    UnknownFeatureFamily { name: String },

    /// A numeric or structural parameter was outside its legal range.
    #[error("invalid {what}: {message}")]
    InvalidParameter { what: String, message: String },

    /// The run configuration file was missing, malformed, or inconsistent.
    #[error("config error: {message}")]
    InvalidConfig { message: String },
}

impl Error {
    /// Convenience constructor for [`Error::Io`].
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Convenience constructor for [`Error::MalformedLine`].
    pub fn malformed(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::MalformedLine {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// Convenience constructor for [`Error::InvalidParameter`].
    pub fn param(what: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            what: what.into(),
            message: message.into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn messages_are_single_line() {
        let errors = vec![
            Error::DuplicateId { id: "t1".into() },
            Error::EmptyDictionary,
            Error::TooFewClasses { found: 1 },
            Error::malformed("x.jsonl", 3, "bad json"),
            Error::param("alpha", "must be positive"),
        ];
        for err in errors {
            let msg = err.to_string();
            assert!(!msg.contains('\n'), "multi-line message: {msg:?}");
            assert!(!msg.is_empty());
        }
    }
}
