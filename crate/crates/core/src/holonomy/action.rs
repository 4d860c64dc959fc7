//! Holonomy of modules generated by a linear action: the transformation
//! groupoid chart `Φ(θ, x) = (exp(θ·M)x, x)`.

use nalgebra::DMatrix;
use serde_json::{json, Value};

use crate::flows::{golden_min, mat_vec, matrix_exp, to_dmatrix, Domain, ExpMap, FlowConfig, FlowError, GroupoidElement};
use crate::geometry::{AmbientAlgebroid, AmbientKind, SingularSubalgebroid};
use crate::pointwise::{fiber_report, PointwiseError};
use crate::poly::{FreeModuleElem, Rational};

use super::chart::{Chart, Provenance};
use super::HolonomyError;

#[derive(Clone, Debug)]
pub struct TransformationHolonomy {
    matrices: Vec<DMatrix<f64>>,
    pub chart: Chart,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IotaProbe {
    pub tested: usize,
    /// Parameters whose constant bisection carries the identity bisection of `M×M`.
    pub carrying_identity: Vec<Vec<f64>>,
    /// Of those, the ones that are not units of `G⋉M`.
    pub non_units: Vec<Vec<f64>>,
}

impl IotaProbe {
    /// `𝓘` consists of units on the samples.
    pub fn trivial(&self) -> bool {
        self.non_units.is_empty()
    }
}

/// Module generated by the fundamental vector fields of `action`. Refuses
/// unless `b` and that module contain each other.
pub fn transformation_holonomy(
    b: &SingularSubalgebroid,
    action: &AmbientAlgebroid,
    param_radius: f64,
    cfg: FlowConfig,
) -> Result<TransformationHolonomy, HolonomyError> {
    if !matches!(action.kind(), AmbientKind::LinearAction { .. }) {
        return Err(HolonomyError::NotAction);
    }
    let n = b.base_dim();
    if action.base_dim() != n || !crate::geometry::is_tangent(b) {
        return Err(HolonomyError::ModuleMismatch { witness: "base dimensions or ambient kinds differ".into() });
    }
    let fundamental: Vec<FreeModuleElem> =
        (0..action.rank()).map(|a| FreeModuleElem::new(n, action.frame_anchor(a).to_vec())).collect();
    for (a, f) in fundamental.iter().enumerate() {
        if !b.contains(f)? {
            return Err(HolonomyError::ModuleMismatch {
                witness: format!("fundamental field {} = {} is not in the module", a + 1, f.display_with(b.vars())),
            });
        }
    }
    let generated = b.with_generators(fundamental)?;
    for (i, g) in b.generators().iter().enumerate() {
        if !generated.contains(g)? {
            return Err(HolonomyError::ModuleMismatch {
                witness: format!("generator {} = {} is not generated by the action", i, b.display_generator(i)),
            });
        }
    }
    let r = action.rank();
    let constants: Vec<FreeModuleElem> = (0..r).map(|a| FreeModuleElem::basis(n, r, a)).collect();
    let exp = ExpMap::new(action, &constants)?;
    let chart = Chart::from_exp(
        exp,
        Domain::cube(r, param_radius),
        Domain::cube(n, f64::INFINITY),
        Provenance::Action { generators: (0..r).collect() },
        cfg,
        0,
    );
    Ok(TransformationHolonomy { matrices: action.matrices().iter().map(|m| to_dmatrix(m)).collect(), chart })
}

impl TransformationHolonomy {
    pub fn group_element(&self, theta: &[f64]) -> DMatrix<f64> {
        let d = self.matrices.first().map_or(0, |m| m.nrows());
        matrix_exp(&theta.iter().zip(&self.matrices).fold(DMatrix::zeros(d, d), |acc, (t, m)| acc + m * *t))
    }

    /// `(exp(θ·M), x)` in `G⋉M`.
    pub fn element(&self, theta: &[f64], x: &[f64]) -> GroupoidElement {
        GroupoidElement::Action { g: self.group_element(theta), x: x.to_vec() }
    }

    /// `Φ(θ, x) = (exp(θ·M)x, x)` in the pair groupoid.
    pub fn phi(&self, theta: &[f64], x: &[f64]) -> GroupoidElement {
        self.element(theta, x).to_pair()
    }

    /// Constant bisections `x ↦ (exp(θ·M), x)` over `thetas`; those moving no
    /// point of `ball` by more than `tol` carry the identity and must be units.
    pub fn iota_probe(&self, thetas: &[Vec<f64>], ball: &[Vec<f64>], tol: f64) -> IotaProbe {
        let mut carrying = Vec::new();
        let mut non_units = Vec::new();
        for th in thetas {
            let g = self.group_element(th);
            let moved = ball.iter().map(|x| {
                let gx = mat_vec(&g, x);
                gx.iter().zip(x).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
            });
            if moved.fold(0.0_f64, f64::max) <= tol {
                carrying.push(th.clone());
                let d = g.nrows();
                if (&g - DMatrix::<f64>::identity(d, d)).amax() > tol {
                    non_units.push(th.clone());
                }
            }
        }
        IotaProbe { tested: thetas.len(), carrying_identity: carrying, non_units }
    }

    /// Smallest `θ ∈ (0, θ_max]` along frame direction `a` with `Φ(θeₐ, x)` a unit
    /// of the pair groupoid: a non-trivial element of the kernel of `Φₓ` on the chart.
    pub fn chart_kernel(&self, a: usize, x: &[f64], theta_max: f64, step: f64, tol: f64) -> Result<Option<f64>, HolonomyError> {
        let r = self.matrices.len();
        let dir = |t: f64| {
            let mut th = vec![0.0; r];
            th[a] = t;
            th
        };
        let f = |t: f64| -> Result<f64, FlowError> { Ok(self.phi(&dir(t), x).distance_to_unit()) };
        let n = (theta_max / step).ceil() as usize;
        let (mut prev, mut cur) = (0.0, f(step)?);
        for i in 1..n {
            let next = f((i + 1) as f64 * step)?;
            if cur < prev && cur <= next {
                let t = golden_min(&f, (i - 1) as f64 * step, (i + 1) as f64 * step, 1e-14)?;
                if f(t)? <= tol {
                    return Ok(Some(t));
                }
            }
            prev = cur;
            cur = next;
        }
        Ok(None)
    }

    pub fn to_json(&self) -> Value {
        json!({"chart": self.chart.to_json()})
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeafwiseReport {
    /// Parameters of the chart over all generators.
    pub initial_parameters: usize,
    /// Parameters of the minimal chart (generators inducing a basis of `ℬₓ`).
    pub chart_parameters: usize,
    pub dim_fiber: usize,
    pub generators: Vec<usize>,
    pub pruned: bool,
}

impl LeafwiseReport {
    pub fn consistent(&self) -> bool {
        self.chart_parameters == self.dim_fiber
    }

    pub fn to_json(&self) -> Value {
        json!({
            "initial_parameters": self.initial_parameters,
            "chart_parameters": self.chart_parameters,
            "dim_fiber": self.dim_fiber,
            "generators": self.generators,
            "pruned": self.pruned,
            "consistent": self.consistent(),
        })
    }
}

/// Source-fiber dimension of a minimal path-holonomy chart at `x`, compared
/// with `dim ℬₓ`. A chart over all generators that is too large is retried
/// with the generators whose classes form a basis of `ℬₓ`.
pub fn leafwise_fiber_dim(b: &SingularSubalgebroid, x: &[Rational]) -> Result<LeafwiseReport, HolonomyError> {
    let report = fiber_report(b, x).map_err(|e| match e {
        PointwiseError::Geometry(g) => HolonomyError::Geometry(g),
        other => HolonomyError::Pointwise(other),
    })?;
    let k = b.num_generators();
    let (generators, pruned) = if k == report.dim_fiber {
        ((0..k).collect::<Vec<_>>(), false)
    } else {
        (report.fiber_basis.clone(), true)
    };
    let chart = Chart::path_holonomy(
        b,
        &generators,
        Domain::cube(generators.len(), 1.0),
        Domain::cube(b.base_dim(), f64::INFINITY),
        FlowConfig::default(),
        0,
    )?;
    Ok(LeafwiseReport {
        initial_parameters: k,
        chart_parameters: chart.k(),
        dim_fiber: report.dim_fiber,
        generators,
        pruned,
    })
}
