use thiserror::Error;

/// Errors raised across the crate. Variants carry enough context to name the
/// failing bound or stage.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("exhaustive search needs {needed} evaluations, budget is {budget}")]
    SizeLimitExceeded { needed: u128, budget: u64 },
    #[error("eigensolver did not converge after {iterations} iterations")]
    ConvergenceFailure { iterations: usize },
    #[error("graph is not regular")]
    NotRegular,
    #[error("demand mismatch: sum of f is {sum}, |B| is {b}")]
    DemandMismatch { sum: usize, b: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("search exhausted in stage {stage}")]
    SearchExhausted { stage: String },
    #[error("capacity exceeded: tree order {tree} > capacity {capacity}")]
    CapacityExceeded { tree: usize, capacity: usize },
    #[error("embedding failed: {0}")]
    EmbeddingFailed(String),
    #[error("vertex {vertex} has no {k}-matching in its neighbourhood")]
    InsufficientNeighborhood { vertex: usize, k: usize },
    #[error("construction failed after {retries} retries")]
    ConstructionFailed { retries: usize },
    #[error("exact-cover identity fails: l*|pairs| = {lhs}, |w| + 2|pairs| = {rhs}")]
    ArithmeticMismatch { lhs: usize, rhs: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("partition retries exhausted; failures per part: {failures:?}")]
    RetriesExhausted { failures: Vec<usize> },
    #[error("rejection budget exceeded while sampling a simple graph")]
    RejectionBudgetExceeded,
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("joinedness contradiction: {0}")]
    JoinednessContradiction(String),
    #[error("strict mode refused: {0}")]
    StrictRefusal(String),
    #[error("stage {stage} failed: {source}")]
    Stage { stage: String, source: Box<Error> },
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn stage(stage: impl Into<String>, source: Error) -> Error {
        Error::Stage { stage: stage.into(), source: Box::new(source) }
    }

    pub(crate) fn exhausted(stage: impl Into<String>) -> Error {
        Error::SearchExhausted { stage: stage.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
