use thiserror::Error;

/// Errors produced anywhere in the crate.
///
/// The CLI maps these onto exit codes through [`Error::exit_code`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("malformed cycle notation: {0}")]
    CycleSyntax(String),
    #[error("point {point} out of range 1..={degree}")]
    PointOutOfRange { point: usize, degree: usize },
    #[error("point {0} appears more than once in cycle notation")]
    RepeatedPoint(usize),
    #[error("not a permutation: {0}")]
    NotAPermutation(String),
    #[error("generator list is empty")]
    EmptyGenerators,
    #[error("group has more than {cap} elements")]
    GroupTooLarge { cap: usize },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("unknown operation `{0}`")]
    UnknownOp(String),
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error(
        "closure budget of {limit} tuples exceeded ({generated} tuples after {rounds} rounds)"
    )]
    Budget {
        limit: usize,
        generated: usize,
        rounds: usize,
    },
    #[error("group is not regular")]
    NotRegular,
    #[error("closure work budget of {limit} operation applications exceeded ({generated} tuples after {rounds} rounds)")]
    WorkBudget {
        limit: u64,
        generated: usize,
        rounds: usize,
    },
    #[error("group is not a direct product of regular orbit restrictions")]
    NoDecomposition,
    #[error("group is not nilpotent")]
    NotNilpotent,
    #[error("no complete method applies: {0}")]
    NoMethod(String),
    #[error("no witness exists on the requested scope")]
    NoWitness,
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("intertwining law fails for {element} at point {point}")]
    Intertwining { element: String, point: usize },
    #[error("factorization is not unique and total: {0}")]
    Factorization(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("json error: {0}")]
    Json(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Process exit status for this error: 2 input, 3 budget, 4 no method, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Budget { .. } | Error::WorkBudget { .. } | Error::GroupTooLarge { .. } => 3,
            Error::NoMethod(_) => 4,
            Error::Verification(_) | Error::NoWitness => 1,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
