use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("dimension {dim} is not a perfect square")]
    NotPerfectSquare { dim: usize },
    #[error("non-finite entry")]
    NonFinite,
    #[error("matrix is not Hermitian (relative defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("{routine} did not converge after {iterations} iterations")]
    NoConvergence {
        routine: &'static str,
        iterations: usize,
    },
    #[error("matrix exponential overflows (norm {norm:.3e})")]
    Overflow { norm: f64 },

    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),
    #[error("point lies outside the tetrahedron (face margins {margins:?})")]
    OutsideTetrahedron { margins: [f64; 4] },

    #[error("matrix is not column stochastic (max column-sum deviation {deviation:.3e}, min entry {min_entry:.3e})")]
    NotColumnStochastic { deviation: f64, min_entry: f64 },
    #[error("matrix is not doubly stochastic (translation norm {translation:.3e})")]
    NotDoublyStochastic { translation: f64 },
    #[error("inconsistent certificate: {0}")]
    InconsistentCertificate(String),
    #[error("sampler gave up after {attempts} attempts")]
    SamplingExhausted { attempts: usize },

    #[error("not a proper rotation: {0}")]
    NotARotation(String),
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("map is not a quantum channel: {0}")]
    NotAChannel(String),

    #[error("generator is not symmetric (max asymmetry {asymmetry:.3e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("generator columns do not sum to zero (max deviation {deviation:.3e})")]
    ColumnSumNotZero { deviation: f64 },
    #[error("exponential consistency violated at t = {time}: {reason}")]
    ConsistencyViolation { time: f64, reason: String },

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("channels were built on different operator bases")]
    BasisMismatch,
    #[error("basis constraint violated: {0}")]
    ConstraintViolation(String),
}
