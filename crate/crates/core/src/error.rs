use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e})")]
    NonHermitian { asymmetry: f64 },
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:.3e})")]
    NotPsd { eigenvalue: f64 },
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("dimension {dim} exceeds the dense-kernel limit of {max}")]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("state cannot be normalized (norm {norm:.3e})")]
    NotNormalizable { norm: f64 },
    #[error("invalid party dimensions: {0}")]
    BadDims(String),
    #[error("wrong number of parties: need {expected}, got {found}")]
    BadPartyCount { expected: String, found: usize },
    #[error("parameter out of range: {0}")]
    BadRange(String),
    #[error("invalid party subset: {0}")]
    BadSubset(String),
    #[error("expected a {expected}-dimensional density matrix, got {found}")]
    BadDimension { expected: usize, found: usize },
    #[error("value {value} outside [{lo}, {hi})")]
    OutOfRange { value: f64, lo: f64, hi: f64 },
    #[error("inconclusive: {0}; tighten the tolerance")]
    Inconclusive(String),
    #[error("range of rho_BC has rank {rank} < 2")]
    DegenerateRange { rank: usize },
    #[error("state is not in the GHZ class (class {found})")]
    NotGhzClass { found: String },
    #[error("state is not in the W class (class {found})")]
    NotWClass { found: String },
    #[error("local operator annihilates the state (image norm {norm:.3e})")]
    Annihilated { norm: f64 },
    #[error("state is not entangled (Schmidt number 1)")]
    NotEntangled,
    #[error("POVM elements are incomplete (residual {residual:.3e})")]
    IncompletePovm { residual: f64 },
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
}
