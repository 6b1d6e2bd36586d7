use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A scalar parameter lies outside its admissible range.
    #[error("{name} = {value} is out of range ({expected})")]
    OutOfRange {
        name: &'static str,
        value: String,
        expected: String,
    },

    /// An index into a family, basis or string is out of bounds.
    #[error("{name} index {index} out of bounds (len {len})")]
    Index {
        name: &'static str,
        index: usize,
        len: usize,
    },

    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// The exact computation was requested beyond the size it is capped at.
    #[error("{what} exceeds the capability cap ({cap}); use the closed-form bounds instead")]
    Capability { what: String, cap: String },

    /// A protocol-level constraint is violated.
    #[error("constraint violated: {0}")]
    Constraint(String),

    /// An operator or state does not have the required structure.
    #[error("malformed input: {0}")]
    Malformed(String),

    /// The literal form of the click probability is zero.
    #[error("degenerate detection model: {0}")]
    Degenerate(String),

    /// Malformed text input.
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn out_of_range(
    name: &'static str,
    value: impl ToString,
    expected: impl Into<String>,
) -> Error {
    Error::OutOfRange {
        name,
        value: value.to_string(),
        expected: expected.into(),
    }
}
