use thiserror::Error;

/// Errors raised by constructions and structural checks.
///
/// "Not a solution" is never an error: verification outcomes are reported in
/// [`crate::SolutionReport`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not symmetric at ({i}, {j})")]
    Asymmetric { i: usize, j: usize },
    #[error("matrix has a nonzero diagonal entry at {i}")]
    NonzeroDiagonal { i: usize },
    #[error("expected {expected} entries, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("dimension {n} exceeds the verification cap {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("exact arithmetic does not take a tolerance (got {0})")]
    ToleranceInExactMode(f64),
    #[error("the zero matrix has no scale-invariant size")]
    ZeroSolution,
    #[error("input does not verify as a solution")]
    NotASolution,
    #[error("block combination needs both theta values zero or both nonzero")]
    UnsupportedCombination,
    #[error("adjacency matrix is empty or complete")]
    DegenerateGraph,
    #[error("malformed adjacency: {0}")]
    MalformedGraph(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{0} is not a prime power")]
    NotAPrimePower(u64),
    #[error("field order {q} exceeds the table cap {cap}")]
    FieldTooLarge { q: u64, cap: u64 },
    #[error("elements belong to different fields (orders {0} and {1})")]
    FieldMismatch(u32, u32),
    #[error("zero has no inverse")]
    InverseOfZero,
    #[error("zero has no discrete logarithm")]
    LogOfZero,
    #[error("character order {d} does not divide q - 1 = {order}")]
    CharacterOrder { d: u64, order: u64 },
    #[error("group functions live on different groups")]
    GroupMismatch,
    #[error("function violates a precondition: {0}")]
    Precondition(String),
    #[error("construction did not verify: {0}")]
    ConstructionMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("arithmetic mode mismatch: expected {expected}, found {found}")]
    ArithmeticMismatch { expected: String, found: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
