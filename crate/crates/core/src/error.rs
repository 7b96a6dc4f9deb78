use thiserror::Error;

/// Errors raised by model construction, the likelihood engines and the estimators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid probability table `{what}`: {reason}")]
    InvalidProbability { what: String, reason: String },

    #[error("transition matrix is not irreducible (singular stationary system)")]
    NonIrreducible,

    #[error("substitution rate must be positive, got {0}")]
    InvalidRate(f64),

    #[error("no transition matrix with equal insertion and deletion frequencies for these free entries")]
    NoStationarySolution,

    #[error("parameter {what} = {value} is below the probability floor {delta}")]
    FloorViolation { what: String, value: f64, delta: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("both sequences are empty")]
    EmptyInput,

    #[error("alignment length {t} is outside [{lo}, {hi}] for endpoint ({n}, {m})")]
    InvalidLength {
        t: usize,
        n: usize,
        m: usize,
        lo: usize,
        hi: usize,
    },

    #[error("traceback needs {cells} cells, cap is {cap}")]
    SizeCap { cells: u128, cap: u128 },

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("did not converge: {0}")]
    NotConverged(String),

    #[error("estimated cost {cost:.3e} exceeds budget {budget:.3e}")]
    BudgetExceeded { cost: f64, budget: f64 },

    #[error("symbol {symbol:?} is not in the alphabet")]
    UnknownSymbol { symbol: char },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid_prob(what: &str, reason: impl Into<String>) -> Self {
        Error::InvalidProbability {
            what: what.to_string(),
            reason: reason.into(),
        }
    }
}
