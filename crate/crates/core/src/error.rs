use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("expected {expected} simple roots in [{lo}, {hi}], isolated {found}")]
    RootCountMismatch {
        expected: usize,
        found: usize,
        lo: f64,
        hi: f64,
    },

    #[error("value {value} outside the admissible range [{lo}, {hi}]")]
    DomainError { value: f64, lo: f64, hi: f64 },

    #[error("level {level} exceeds the capacity policy (max level {max_level} and the vertex budget)")]
    CapacityExceeded { level: u32, max_level: u32 },

    #[error("dirichlet problem at level 0 has no interior vertices")]
    EmptyInterior,

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("lambda = 2^d/(2^d-1) is excluded here")]
    TopValueExcluded,

    #[error("lambda = {0} is a forbidden eigenvalue")]
    ForbiddenEigenvalue(f64),

    #[error("lambda = {lambda} lies within {distance:e} of the forbidden set")]
    NearForbidden { lambda: f64, distance: f64 },

    #[error("local extension system is numerically singular (smallest singular value {0:e})")]
    SingularSystem(f64),

    #[error("input is not an eigenfunction (residual {residual:e})")]
    NotEigenfunction { residual: f64 },

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("no witness M <= {bound}; a witness exists at M = {witness}")]
    InconclusiveBound { bound: usize, witness: usize },

    #[error("invalid range: {0}")]
    InvalidRange(String),
}
