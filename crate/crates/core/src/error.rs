use thiserror::Error;

/// Errors raised by the library.
///
/// Variants fall into three families that the command-line runner maps to
/// distinct exit codes: input problems, exhausted budgets, and violated
/// preconditions of a construction.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("context mismatch: {0}")]
    ContextMismatch(String),

    #[error("budget exceeded: {what} (limit {limit})")]
    Budget { what: &'static str, limit: u128 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("not a subgroup: {0}")]
    NotASubgroup(String),

    #[error("no witness: {0}")]
    NoWitness(String),

    #[error("invalid task: {0}")]
    TaskInvalid(String),
}

impl Error {
    pub(crate) fn malformed(msg: impl Into<String>) -> Self {
        Error::Malformed(msg.into())
    }

    pub(crate) fn mismatch(msg: impl Into<String>) -> Self {
        Error::ContextMismatch(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// True for errors caused by a finite search or enumeration limit rather
    /// than by the input itself.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }

    /// Process exit code: 2 for input errors, 3 for budgets, 4 when the
    /// requested object provably does not exist.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Budget { .. } => 3,
            Error::NoWitness(_) => 4,
            _ => 2,
        }
    }

    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Malformed(_) => "malformed",
            Error::ContextMismatch(_) => "context_mismatch",
            Error::Budget { .. } => "budget",
            Error::Precondition(_) => "precondition",
            Error::NotASubgroup(_) => "not_a_subgroup",
            Error::NoWitness(_) => "no_witness",
            Error::TaskInvalid(_) => "task_invalid",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
