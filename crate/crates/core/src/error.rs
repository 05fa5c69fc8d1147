use alloc::string::String;

/// Errors produced by the core library.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("operation requires field {expected}, got {found}")]
    WrongField { expected: &'static str, found: String },
    #[error("arity mismatch: expected {expected}, got {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid field parameters: {0}")]
    InvalidField(String),
    #[error("{limit} {what} cap exceeded")]
    CapExceeded { what: &'static str, limit: usize },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("polynomial or program is not homogeneous: {0}")]
    NotHomogeneous(String),
    #[error("circuit is not monotone: {0}")]
    NotMonotone(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for errors that signal an exhausted resource cap rather than bad input.
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}

pub type Result<T> = core::result::Result<T, Error>;

/// Resource caps for dense expansion and enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Maximum number of terms (or words, or table cells) an operation may materialize.
    pub max_terms: usize,
    /// Maximum formal degree (or word length) an operation may expand to.
    pub max_degree: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_terms: 1 << 20,
            max_degree: 64,
        }
    }
}

impl Caps {
    pub fn check_terms(&self, n: usize) -> Result<()> {
        if n > self.max_terms {
            return Err(Error::CapExceeded {
                what: "term",
                limit: self.max_terms,
            });
        }
        Ok(())
    }

    pub fn check_degree(&self, d: usize) -> Result<()> {
        if d > self.max_degree {
            return Err(Error::CapExceeded {
                what: "degree",
                limit: self.max_degree,
            });
        }
        Ok(())
    }
}
