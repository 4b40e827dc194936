use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex count must be at least {min}, got {n}")]
    TooFewVertices { n: usize, min: usize },

    #[error("n*d must be even: n={n}, d={d}")]
    OddDegreeSum { n: usize, d: usize },

    #[error("degree must satisfy 1 <= d < n: n={n}, d={d}")]
    InfeasibleDegree { n: usize, d: usize },

    #[error(
        "no connected simple {d}-regular graph on {n} vertices found after {attempts} attempts"
    )]
    GenerationFailed { n: usize, d: usize, attempts: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is not connected")]
    Disconnected,

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix asymmetric: max |A - A^T| entry is {max_delta:e}")]
    Asymmetric { max_delta: f64 },

    #[error("eigensolver did not converge in {sweeps} sweeps: off-diagonal norm {off_norm:e} above tolerance {tol:e}")]
    NoConvergence {
        sweeps: usize,
        off_norm: f64,
        tol: f64,
    },

    #[error("singular matrix: pivot {pivot:e} at column {column}")]
    Singular { column: usize, pivot: f64 },

    #[error("matrix dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("invalid probabilities: {0}")]
    BadProbabilities(String),

    #[error("walk incompatible with graph: {0}")]
    IncompatibleWalk(String),

    #[error("asymmetric circulant generator: a[{index}] != a[n-{index}]")]
    AsymmetricGenerator { index: usize },

    #[error("expected exactly one zero eigenvalue, found {found}")]
    ZeroEigenvalueCount { found: usize },

    #[error("meeting set unreachable from pair state ({0}, {1})")]
    MeetingUnreachable(usize, usize),

    #[error("{0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("all {0} trials were truncated at the step cap")]
    AllTrialsTruncated(u64),
}

pub type Result<T> = std::result::Result<T, Error>;
