//! Singular subalgebroids of Lie algebroids: exact module computations over
//! polynomial rings, pointwise fiber invariants, flows and bisections, chart
//! presentations of holonomy groupoids, and the differentiation back to sections.

pub mod diffdiff;
pub mod flows;
pub mod geometry;
pub mod graph;
pub mod holonomy;
pub mod linalg;
pub mod pointwise;
pub mod poly;

pub use flows::{FlowConfig, GroupoidElement};
pub use geometry::{parse, print, AmbientAlgebroid, GeometryError, SingularSubalgebroid};
pub use poly::{FreeModuleElem, Poly, Rational};
