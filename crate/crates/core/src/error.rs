use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input is malformed (wrong shape, unknown label, ...); distinct from a
    /// well-formed input that fails a property check.
    #[error("structural error: {0}")]
    Structural(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("filter base has empty intersection: {0}")]
    EmptyIntersection(String),

    #[error("sequence does not define a point of the cone: {0}")]
    NotInCone(String),

    #[error("exhaustive search refused: {0}")]
    SizeGuard(String),

    /// A certified comparison did not separate within the refinement budget.
    #[error("undecided at maximum refinement: {0}")]
    Undecided(String),

    #[error("resource guard: {0}")]
    Resource(String),

    #[error("accumulation bound exceeded at level r = {level}: {count} > {bound}")]
    Accumulation { level: u128, count: usize, bound: usize },

    #[error("cannot parse rational {0:?}")]
    ParseRational(String),

    #[error("{path}: line {line}, column {column}: {message}")]
    Json {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
