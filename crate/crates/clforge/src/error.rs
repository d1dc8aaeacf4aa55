use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Parameter outside the supported family (q must be a prime power with
    /// q = 2 mod 3, and sizes must fit the table representation).
    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),

    /// A user-supplied defining polynomial that is not monic, has coefficients
    /// outside F_p, has the wrong degree, or is reducible.
    #[error("bad polynomial: {0}")]
    BadPolynomial(String),

    /// Requested tables exceed the configured memory cap.
    #[error("table size exceeds cap: {0}")]
    TooLarge(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("domain error: {0}")]
    DomainError(String),

    /// An internal invariant of the construction failed (duplicate orbit,
    /// unexpected multiplicity, size mismatch). Always a bug or a bad field.
    #[error("construction violation: {0}")]
    ConstructionViolation(String),

    /// The quadric or one of its restrictions turned out degenerate.
    #[error("nondegeneracy violation: {0}")]
    NondegeneracyViolation(String),

    /// Plucker coordinates that do not correspond to a line.
    #[error("not a line: {0}")]
    NotALine(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
