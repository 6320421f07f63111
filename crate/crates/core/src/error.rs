use thiserror::Error;

/// Failure modes shared by every module in the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("singular input: {0}")]
    Singular(String),

    #[error("vector is not primitive in the lattice")]
    NotPrimitive,

    #[error("vector does not lie in the lattice")]
    NotInLattice,

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    /// A bounded search or enumeration would exceed its configured budget.
    #[error("budget exceeded: {what} (attempted {attempted}, limit {limit})")]
    BudgetExceeded {
        what: &'static str,
        attempted: String,
        limit: String,
    },

    /// Two routes that must agree did not. Always a bug.
    #[error("internal invariant failed: {0}")]
    Invariant(String),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn budget(
        what: &'static str,
        attempted: impl ToString,
        limit: impl ToString,
    ) -> Self {
        Error::BudgetExceeded {
            what,
            attempted: attempted.to_string(),
            limit: limit.to_string(),
        }
    }

    /// Short machine-readable tag for error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Precondition(_) => "precondition",
            Error::Singular(_) => "singular",
            Error::NotPrimitive => "not-primitive",
            Error::NotInLattice => "not-in-lattice",
            Error::Overflow(_) => "overflow",
            Error::BudgetExceeded { .. } => "budget-exceeded",
            Error::Invariant(_) => "invariant",
            Error::Io { .. } => "io",
            Error::Parse(_) => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
