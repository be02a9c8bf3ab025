//! Exact arithmetic over ℚ(i) and the dense linear algebra built on it.

mod echelon;
mod float_rank;
mod matrix;
mod scalar;
mod subspace;
mod system;

pub use echelon::{kernel, rref, Rref};
pub use float_rank::float_rank;
pub use matrix::ExactMatrix;
pub use scalar::{rational_literal, GaussianRational};
pub use subspace::MatrixSubspace;
pub use system::{solve_with_scalars, solve_with_scalars_on, Constraint, ScalarSolution};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("invalid literal {text:?}: {reason}")]
    Literal { text: String, reason: String },
}
