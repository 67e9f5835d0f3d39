use thiserror::Error;

/// Failures of the user-order algorithms.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("order relation contains a cycle through vertex {0}")]
    Cycle(usize),
    #[error("vertex {vertex} out of range for {n} vertices")]
    OutOfRange { vertex: usize, n: usize },
    #[error("reflexive comparison of user {0}")]
    ReflexiveComparison(usize),
    #[error("user {0} is a member of the bag")]
    UserInBag(usize),
    #[error("separation query violates its precondition: {0}")]
    SeparationPrecondition(String),
}

/// Instance-file parse failures. Line numbers are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown name `{name}`")]
    DanglingName { line: usize, name: String },
    #[error("order declaration is cyclic: {0}")]
    CyclicOrder(OrderError),
}

impl ParseError {
    pub(crate) fn syntax(line: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TdError {
    #[error("tree decomposition has no bags")]
    Empty,
    #[error("invalid tree decomposition: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("exact treewidth search is capped at {cap} vertices, graph has {n}")]
    ExactTooLarge { n: usize, cap: usize },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("solver inputs disagree on the user universe: {0}")]
    UniverseMismatch(String),
    #[error("{0} supersteps exceed the solver limit of {1}")]
    TooManySteps(usize, usize),
    #[error("bag of {0} users exceeds the solver limit of {1}")]
    BagTooLarge(usize, usize),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("search budget of {0} nodes exceeded; use the dynamic-programming solver")]
    BudgetExceeded(u64),
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error("invalid reduction input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Umbrella error for the end-to-end pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Td(#[from] TdError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}
