use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: max|M - M^dag| = {deviation:e} exceeds {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("density operator has eigenvalue {0:e} below the -1e-10 clipping window")]
    NegativeEigenvalue(f64),

    #[error("zero vector where a nonzero state is required")]
    ZeroVector,

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("invalid subsystem index {index} for {count} subsystems")]
    InvalidSubsystem { index: usize, count: usize },

    #[error("subsystem dimensions {dims:?} do not match vector/matrix size {size}")]
    InconsistentDims { dims: Vec<usize>, size: usize },

    #[error("Fock dimension {dim} is too small for |alpha| = {alpha}: tail weight {tail:e}; need dim >= {required}")]
    TruncationInadequate {
        alpha: f64,
        dim: usize,
        required: usize,
        tail: f64,
    },

    #[error("Fock dimension must be at least 2 (got {0})")]
    FockTooSmall(usize),

    #[error("unknown atomic level `{0}`")]
    UnknownLabel(String),

    #[error("invalid system parameters: {0}")]
    InvalidParams(String),

    #[error("transformation generator is singular: Delta == delta")]
    SingularGenerator,

    #[error("closed-form evolution requires g2 = g1/sqrt(1+eps) within 1e-6 relative (g2 = {g2}, expected {expected})")]
    ClosedFormInvalid { g2: f64, expected: f64 },

    #[error("degenerate state: {0}")]
    DegenerateState(String),

    #[error("coherent projection annihilated the state (weight {0:e})")]
    ProjectionAnnihilated(f64),

    #[error("invalid sweep grid: {0}")]
    InvalidGrid(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of a numeric contract (as opposed to bad input or I/O).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NotHermitian { .. }
                | Error::NegativeEigenvalue(_)
                | Error::ZeroVector
                | Error::NotNormalized(_)
                | Error::SingularGenerator
                | Error::ClosedFormInvalid { .. }
                | Error::DegenerateState(_)
                | Error::ProjectionAnnihilated(_)
                | Error::TruncationInadequate { .. }
        )
    }
}
