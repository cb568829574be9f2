use thiserror::Error;

/// Text-format error with the byte offset where parsing stopped.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(offset: usize, message: impl Into<String>) -> Self {
        ParseError {
            offset,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operands use different scalar modes")]
    ModeMismatch,

    #[error("variable index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("the zero polynomial has no degree")]
    ZeroPolynomial,

    #[error("polynomial is not homogeneous quadratic")]
    NotQuadratic,

    #[error("no nonzero balance found")]
    NoBalance,

    #[error("vector is not a balance (residual {residual:e})")]
    NotABalance { residual: f64 },

    #[error("-1 is not an eigenvalue of the Kovalevskaya matrix")]
    MissingTrivialExponent,

    #[error("Kovalevskaya matrix is not diagonalizable")]
    NotDiagonalizable,

    #[error("matrix is singular")]
    Singular,

    #[error("normal form shape check failed: {0}")]
    ShapeViolation(String),

    #[error("resonance set J({0}) is empty")]
    EmptyResonance(u32),

    #[error("seed {0} is not in the resonance set")]
    InvalidSeed(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("need two linearly independent balances, found {0}")]
    TooFewBalances(usize),

    #[error("exponent pair with rho1 = -1 is outside the planar reduction")]
    TrivialPlanarExponent,

    #[error("trajectory blew up at t = {t}")]
    BlowUp { t: f64 },

    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T> = std::result::Result<T, Error>;
