//! Path-holonomy exponential `(λ, x) ↦ exp_x Σ λᵢ αᵢ` for the three ambient kinds.

use nalgebra::DMatrix;

use crate::geometry::{AmbientAlgebroid, AmbientKind, SingularSubalgebroid};
use crate::poly::{rational_to_f64, FreeModuleElem};

use super::expm::matrix_exp;
use super::groupoid::{mat_vec, GroupoidElement};
use super::ode::{integrate, CompiledField, FlowConfig};
use super::FlowError;

#[derive(Clone, Debug)]
enum Kind {
    Tangent,
    Group { generators: Vec<DMatrix<f64>> },
    Action { coeffs: Vec<CompiledField>, matrices: Vec<DMatrix<f64>> },
}

/// Precompiled exponential map for a fixed list of sections.
#[derive(Clone, Debug)]
pub struct ExpMap {
    kind: Kind,
    base_dim: usize,
    /// `ρ(αᵢ)` as vector fields on the base.
    anchors: Vec<CompiledField>,
    /// Realization matrices, one per frame element (empty for the tangent ambient).
    frame_matrices: Vec<DMatrix<f64>>,
}

pub(crate) fn to_dmatrix(m: &[Vec<crate::poly::Rational>]) -> DMatrix<f64> {
    let d = m.len();
    DMatrix::from_fn(d, d, |i, j| rational_to_f64(&m[i][j]))
}

impl ExpMap {
    pub fn new(ambient: &AmbientAlgebroid, sections: &[FreeModuleElem]) -> Result<Self, FlowError> {
        let n = ambient.base_dim();
        let anchors = sections
            .iter()
            .map(|s| Ok(CompiledField::new(ambient.anchor(s)?.components())))
            .collect::<Result<Vec<_>, FlowError>>()?;
        let frame_matrices: Vec<DMatrix<f64>> = ambient.matrices().iter().map(|m| to_dmatrix(m)).collect();
        let kind = match ambient.kind() {
            AmbientKind::Tangent => Kind::Tangent,
            AmbientKind::LieAlgebra { .. } => {
                let d = frame_matrices.first().map_or(0, |m| m.nrows());
                let generators = sections
                    .iter()
                    .map(|s| {
                        let vals = s.evaluate_f64(&[]);
                        vals.iter().zip(&frame_matrices).fold(DMatrix::zeros(d, d), |acc, (c, m)| acc + m * *c)
                    })
                    .collect();
                Kind::Group { generators }
            }
            AmbientKind::LinearAction { .. } => Kind::Action {
                coeffs: sections.iter().map(|s| CompiledField::new(s.components())).collect(),
                matrices: frame_matrices.clone(),
            },
        };
        Ok(ExpMap { kind, base_dim: n, anchors, frame_matrices })
    }

    pub fn for_generators(b: &SingularSubalgebroid) -> Result<Self, FlowError> {
        Self::new(b.ambient(), b.generators())
    }

    pub fn num_parameters(&self) -> usize {
        self.anchors.len()
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    /// The vector field `Σ λᵢ ρ(αᵢ)`.
    pub fn anchor_field(&self, lambda: &[f64]) -> CompiledField {
        CompiledField::combination(&self.anchors, lambda)
    }

    pub fn unit(&self, x: &[f64]) -> GroupoidElement {
        match &self.kind {
            Kind::Tangent => GroupoidElement::Pair { target: x.to_vec(), source: x.to_vec() },
            Kind::Group { .. } => {
                let d = self.frame_matrices.first().map_or(0, |m| m.nrows());
                GroupoidElement::Group(DMatrix::identity(d, d))
            }
            Kind::Action { matrices, .. } => {
                let d = matrices.first().map_or(self.base_dim, |m| m.nrows());
                GroupoidElement::Action { g: DMatrix::identity(d, d), x: x.to_vec() }
            }
        }
    }

    fn check(&self, lambda: &[f64], x: &[f64]) -> Result<(), FlowError> {
        if lambda.len() != self.num_parameters() {
            return Err(FlowError::ParameterCount { expected: self.num_parameters(), found: lambda.len() });
        }
        if x.len() != self.base_dim {
            return Err(FlowError::DimensionMismatch { expected: self.base_dim, found: x.len() });
        }
        Ok(())
    }

    /// Only the target `t(exp_x Σ λᵢ αᵢ)`, the time-1 flow of `Σ λᵢ ρ(αᵢ)`.
    pub fn target(&self, lambda: &[f64], x: &[f64], cfg: &FlowConfig) -> Result<Vec<f64>, FlowError> {
        self.check(lambda, x)?;
        if self.base_dim == 0 {
            return Ok(Vec::new());
        }
        let v = self.anchor_field(lambda);
        integrate(|y, out| v.eval_into(y, out), x, 1.0, cfg)
    }

    pub fn exp(&self, lambda: &[f64], x: &[f64], cfg: &FlowConfig) -> Result<GroupoidElement, FlowError> {
        self.check(lambda, x)?;
        match &self.kind {
            Kind::Tangent => Ok(GroupoidElement::Pair { target: self.target(lambda, x, cfg)?, source: x.to_vec() }),
            Kind::Group { generators } => {
                let d = self.frame_matrices.first().map_or(0, |m| m.nrows());
                let a = generators.iter().zip(lambda).fold(DMatrix::zeros(d, d), |acc, (m, l)| acc + m * *l);
                Ok(GroupoidElement::Group(matrix_exp(&a)))
            }
            Kind::Action { coeffs, matrices } => {
                let d = self.base_dim;
                let r = matrices.len();
                // ġ = a(g·x)·g, a(y) = Σᵢ λᵢ Σ_b fᵢᵇ(y) M_b
                let mut fvals = vec![0.0; r];
                let rhs = |state: &[f64], out: &mut [f64]| {
                    let g = DMatrix::from_row_slice(d, d, state);
                    let y = mat_vec(&g, x);
                    let mut a = DMatrix::<f64>::zeros(d, d);
                    for (c, &l) in coeffs.iter().zip(lambda) {
                        if l == 0.0 {
                            continue;
                        }
                        c.eval_into(&y, &mut fvals);
                        for (fv, m) in fvals.iter().zip(matrices) {
                            if *fv != 0.0 {
                                a += m * (l * fv);
                            }
                        }
                    }
                    let gd = a * g;
                    for i in 0..d {
                        for j in 0..d {
                            out[i * d + j] = gd[(i, j)];
                        }
                    }
                };
                let id: Vec<f64> = DMatrix::<f64>::identity(d, d).transpose().iter().copied().collect();
                let state = integrate(rhs, &id, 1.0, cfg)?;
                Ok(GroupoidElement::Action { g: DMatrix::from_row_slice(d, d, &state), x: x.to_vec() })
            }
        }
    }

    /// Frame coordinates of `(e_plus − e_minus) / 2h`, the velocity of a
    /// curve through the unit at `x` (the tangent frame is `∂ᵢ`, otherwise the
    /// realization matrices).
    pub fn frame_velocity(&self, e_plus: &GroupoidElement, e_minus: &GroupoidElement, h: f64) -> Vec<f64> {
        let diff_mat = |a: &DMatrix<f64>, b: &DMatrix<f64>| -> Vec<f64> {
            let dm = (a - b) / (2.0 * h);
            let ms = &self.frame_matrices;
            let d2 = dm.len();
            let basis = DMatrix::from_fn(d2, ms.len(), |i, j| ms[j].transpose()[i]);
            let rhs = nalgebra::DVector::from_iterator(d2, dm.transpose().iter().copied());
            basis.svd(true, true).solve(&rhs, 1e-12).map(|v| v.iter().copied().collect()).unwrap_or_default()
        };
        match (e_plus, e_minus) {
            (GroupoidElement::Pair { target: a, .. }, GroupoidElement::Pair { target: b, .. }) => {
                a.iter().zip(b).map(|(u, v)| (u - v) / (2.0 * h)).collect()
            }
            (GroupoidElement::Group(a), GroupoidElement::Group(b)) => diff_mat(a, b),
            (GroupoidElement::Action { g: a, .. }, GroupoidElement::Action { g: b, .. }) => diff_mat(a, b),
            _ => Vec::new(),
        }
    }
}

/// `exp_x Σ λᵢ gᵢ` for the generators of `b`.
pub fn path_holonomy_exp(
    b: &SingularSubalgebroid,
    lambda: &[f64],
    x: &[f64],
    cfg: &FlowConfig,
) -> Result<GroupoidElement, FlowError> {
    ExpMap::for_generators(b)?.exp(lambda, x, cfg)
}
