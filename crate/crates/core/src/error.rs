use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix must be nonempty")]
    Empty,

    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid tolerance: {0}")]
    BadTolerance(String),

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("{what} is not an orthogonal projection (residual {residual:e})")]
    NotProjector { what: &'static str, residual: f64 },

    #[error("not a product of two orthogonal projections (Crimmins residual {residual:e})")]
    NotInX { residual: f64 },

    #[error("not of the form PQP: {0}")]
    NotInY(String),

    #[error("not a partial isometry (residual {residual:e})")]
    NotPartialIsometry { residual: f64 },

    #[error("partial isometry is not the isometric part of a product of projections")]
    NotInJX,

    #[error("invalid parametrization: {0}")]
    InvalidParametrization(String),

    #[error("subspaces are not complementary (intersection dim {intersection_dim}, sum dim {sum_dim} of {ambient})")]
    NotComplementary { intersection_dim: usize, sum_dim: usize, ambient: usize },

    #[error("invalid two-projections form: {0}")]
    InvalidForm(String),

    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
}
