use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("interval edge {{{0},{1}}} not allowed here")]
    IntervalEdgePresent(usize, usize),

    #[error("eigensolver did not converge after {0} sweeps")]
    Convergence(usize),

    #[error("matrix is not PSD (eigenvalue {0})")]
    NotPsd(f64),

    #[error("rank {rank} exceeds target dimension {k}")]
    RankExceedsK { rank: usize, k: usize },

    #[error("graph too large for exhaustive enumeration: {n} vertices (limit {limit})")]
    TooLarge { n: usize, limit: usize },

    #[error("unsupported dimension K={0}")]
    UnsupportedDimension(usize),

    #[error("instance has no discretization order")]
    NotDiscretizable,

    #[error("initial clique cannot be realized: {0}")]
    InfeasibleInitialClique(String),

    #[error("sphere centers are affinely dependent")]
    DegenerateCenters,

    #[error("reflection hyperplane is degenerate at level {0}")]
    DegenerateHyperplane(usize),

    #[error("operation requires a DMDGP order")]
    NotDmdgp,

    #[error("seed realization does not satisfy the instance (max error {0})")]
    InvalidSeedSolution(f64),

    #[error("distance list has {m} values, complete graph on {n} vertices needs {expected}")]
    BadCardinality { m: usize, n: usize, expected: usize },

    #[error("incomplete assignment: {0}")]
    IncompleteAssignment(String),

    #[error("partition instance needs at least 3 entries, got {0}")]
    TooShort(usize),

    #[error("index set is not a partition witness ({left} != {right})")]
    NotAWitness { left: u64, right: u64 },

    #[error("realization does not satisfy the cycle instance: {0}")]
    InvalidRealization(String),

    #[error("not a metric: {0}")]
    MetricViolation(String),

    #[error("epsilon must lie in (0,1), got {0}")]
    BadEpsilon(f64),

    #[error("{0}")]
    Io(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
