use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("constraint matrix has rank {rank} but {rows} rows")]
    RankDeficient { rank: usize, rows: usize },

    #[error("basis columns are not invertible")]
    SingularBasis,

    #[error("vector is zero")]
    ZeroVector,

    #[error("enumeration over {n} columns exceeds the cap of {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("vector is not in the kernel of the constraint matrix")]
    NotInKernel,

    #[error("kappa estimate exhausted after {doublings} squarings")]
    EstimateCeiling { doublings: usize },

    #[error("ratio-circuit program is unbounded")]
    UnboundedRatioLp,

    #[error("augmentation direction is zero")]
    ZeroDirection,

    #[error("augmentation step is unbounded")]
    UnboundedStep,

    #[error("start point is infeasible: {0}")]
    InfeasibleStart(String),

    #[error("target is not a feasible vertex: {0}")]
    InfeasibleTarget(String),

    #[error("{what} exceeded its iteration cap of {cap}")]
    IterationCap { what: &'static str, cap: usize },

    #[error("Ax = b has no solution")]
    NoLinearSolution,

    #[error("stacked constraint matrix is rank deficient; polyhedron has a lineality space")]
    LinealitySpace,

    #[error("instance generation failed after {attempts} attempts")]
    GenerationFailed { attempts: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("i/o: {0}")]
    Io(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }
}
