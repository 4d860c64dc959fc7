//! Numerical flows, matrix exponentials, path-holonomy exponentials and
//! 1-parameter groups of bisections.

mod exp;
mod expm;
mod family;
mod groupoid;
mod ode;

use thiserror::Error;

use crate::geometry::GeometryError;
use crate::poly::AlgebraError;

pub use exp::{path_holonomy_exp, ExpMap};
pub(crate) use exp::to_dmatrix;
pub use expm::matrix_exp;
pub use family::{golden_min, one_parameter_group, BisectionFamily, Domain};
pub use groupoid::{mat_vec, orthogonality_defect, GroupoidElement};
pub use ode::{flow, integrate, integrate_fixed, CompiledField, FlowConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("solution escapes before the requested time (reached t = {time})")]
    FiniteEscape { time: f64 },
    #[error("step limit reached at t = {time}")]
    StepLimit { time: f64 },
    #[error("non-finite input")]
    NonFinite,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("expected {expected} parameters, found {found}")]
    ParameterCount { expected: usize, found: usize },
    #[error("elements are not composable (source/target gap {gap})")]
    NotComposable { gap: f64 },
    #[error("elements belong to different groupoids")]
    KindMismatch,
    #[error("section is not a member of the module")]
    NotMember,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

impl From<AlgebraError> for FlowError {
    fn from(e: AlgebraError) -> Self {
        FlowError::Geometry(GeometryError::Algebra(e))
    }
}
