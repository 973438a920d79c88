use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input to a library operation (dimension mismatch, unknown
    /// name, inconsistent scenario sets).
    #[error("input error: {0}")]
    Input(String),

    /// A model object violates one of its construction invariants.
    #[error("validation error: {0}")]
    Validation(String),

    /// A dual point with zero total mass cannot be turned into a measure.
    #[error("degenerate dual solution: sum of P(w) * y1(w) is zero")]
    DegenerateDual,

    /// Something that cannot happen on a well-formed model did happen.
    #[error("internal error: {0}")]
    Internal(String),

    /// Input text is not syntactically valid.
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    /// A syntactically valid field holds an unusable value.
    #[error("invalid value in {field}: {message}")]
    Value { field: String, message: String },
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
