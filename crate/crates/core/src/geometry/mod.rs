//! Ambient Lie algebroids, section brackets, the text format and the
//! singular-subalgebroid container.

mod algebroid;
pub mod dsl;
mod subalgebroid;

use thiserror::Error;

use crate::poly::AlgebraError;

pub use algebroid::{
    commutator, derive_along, jacobi_violation, mat_mul, named_realization, AmbientAlgebroid,
    AmbientKind, RatMatrix,
};
pub use dsl::{parse, print, DslError};
pub use subalgebroid::{
    default_vars, is_tangent, subalgebroid_over_submanifold, Involutivity, InvolutivityWitness, SingularSubalgebroid,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("parse error at {0}")]
    Dsl(#[from] DslError),
    #[error("frame rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid realization: {0}")]
    InvalidRealization(String),
    #[error("realization not closed under commutator: [{i},{j}] leaves the span")]
    NotClosed { i: usize, j: usize },
    #[error("unknown Lie algebra `{0}`")]
    UnknownAlgebra(String),
    #[error("module is not involutive: bracket of generators {i} and {j} is not a member")]
    NotInvolutive { i: usize, j: usize },
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
}
