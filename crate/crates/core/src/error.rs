use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}")]
    InvalidDimension(usize),

    #[error("dimension mismatch: operator has {expected}, vector has {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("operator is not Hermitian (residual {0:e})")]
    NonHermitian(f64),

    #[error("energy gradient vanishes (norm {0:e}); state is an eigenstate")]
    DegenerateGradient(f64),

    #[error("spectrum is degenerate (width {0:e}); every state has the same energy")]
    DegenerateSpectrum(f64),

    #[error("operator representation does not support {0}")]
    Representation(&'static str),

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid model specification: {0}")]
    InvalidModel(String),

    #[error("invalid sampler configuration: {0}")]
    InvalidConfig(String),

    #[error("eigenvalue pairing violated by {0:e}")]
    NumericalPairing(f64),

    #[error("quadrature did not converge: estimated relative error {achieved:e} > {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("invalid beta {0}: crosses the pole 1 + beta E = 0")]
    InvalidBeta(f64),

    #[error("target {value} outside the open interval ({lower}, {upper})")]
    OutOfRange { value: f64, lower: f64, upper: f64 },

    #[error("sampler stuck at E* = {e_star} after {retries} rejected trajectories")]
    StuckSampler { e_star: f64, retries: usize },

    #[error("conjugate gradient did not converge: relative residual {residual:e} after {iterations} iterations")]
    SolverFailure { residual: f64, iterations: usize },

    #[error("operator is not positive semidefinite on the deflated subspace (curvature {0:e})")]
    NotPsd(f64),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("no records to bin")]
    EmptyObservable,

    #[error("malformed dump: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
