//! Chart presentations of holonomy groupoids, subgroup integration and
//! transformation-groupoid holonomy.

mod action;
mod chart;
mod subgroup;

use thiserror::Error;

use crate::flows::FlowError;
use crate::geometry::GeometryError;
use crate::pointwise::PointwiseError;
use crate::poly::AlgebraError;

pub use action::{leafwise_fiber_dim, transformation_holonomy, IotaProbe, LeafwiseReport, TransformationHolonomy};
pub use chart::{compose_charts, invert_chart, kappa_defect, Atlas, Chart, Provenance};
pub use subgroup::{
    integrate_lie_subalgebra, integrate_lie_subalgebra_f64, Closure, KernelElement, SubgroupConfig, SubgroupReport,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HolonomyError {
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Pointwise(PointwiseError),
    #[error("no composable samples: the fibered product is empty")]
    EmptyFiberedProduct,
    #[error("point outside the chart domain")]
    OutsideChart,
    #[error("expected {expected} parameters, found {found}")]
    ParameterCount { expected: usize, found: usize },
    #[error("the κ identity fails on samples (defect {defect:e})")]
    KappaMismatch { defect: f64 },
    #[error("κ is only defined for path-holonomy charts")]
    NotPathHolonomy,
    #[error("not a subalgebra: bracket of basis elements {i} and {j} is {bracket:?}")]
    NotSubalgebra { i: usize, j: usize, bracket: Vec<f64> },
    #[error("ambient is not a linear action")]
    NotAction,
    #[error("module is not generated by the action: {witness}")]
    ModuleMismatch { witness: String },
}

impl From<AlgebraError> for HolonomyError {
    fn from(e: AlgebraError) -> Self {
        HolonomyError::Geometry(GeometryError::Algebra(e))
    }
}
