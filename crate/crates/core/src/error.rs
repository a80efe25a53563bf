use thiserror::Error;

/// Library-wide error type.
///
/// `InvalidInput` covers violations of documented preconditions (bad data);
/// `NumericalFailure` covers float-mode situations where the library refuses
/// to guess (cluster ambiguity, matching ambiguity, tolerance inconsistency).
/// `Internal` marks states the theory forbids; reaching one is a bug.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mode mismatch: {0}")]
    ModeMismatch(&'static str),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("zero form where a nonzero form is required")]
    ZeroForm,

    #[error("both inputs are zero forms")]
    BothZero,

    #[error("singular matrix: determinant is zero (or below tolerance)")]
    SingularMatrix,

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("constellation product of generators is not the identity")]
    NonIdentityProduct,

    #[error("constellation does not act transitively")]
    Intransitive,

    #[error("invalid covering data: {0}")]
    InvalidCovering(String),

    #[error("malformed word: {0}")]
    MalformedWord(String),

    #[error("block system not preserved by generator {0}")]
    BlocksNotPreserved(usize),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
