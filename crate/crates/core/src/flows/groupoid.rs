use nalgebra::{DMatrix, DVector};
use serde_json::{json, Value};

use super::FlowError;

/// Element of one of the three integrating groupoids: the pair groupoid
/// `M×M`, a matrix group over a point, or the transformation groupoid `G⋉M`.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupoidElement {
    Pair { target: Vec<f64>, source: Vec<f64> },
    Group(DMatrix<f64>),
    /// `(g, x)` with source `x` and target `g·x`.
    Action { g: DMatrix<f64>, x: Vec<f64> },
}

pub fn mat_vec(g: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (g * DVector::from_column_slice(x)).iter().copied().collect()
}

fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (u, v)| m.max((u - v).abs()))
}

fn mat_dist(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).fold(0.0, |m, (u, v)| m.max((u - v).abs()))
}

impl GroupoidElement {
    pub fn source(&self) -> Vec<f64> {
        match self {
            GroupoidElement::Pair { source, .. } => source.clone(),
            GroupoidElement::Group(_) => Vec::new(),
            GroupoidElement::Action { x, .. } => x.clone(),
        }
    }

    pub fn target(&self) -> Vec<f64> {
        match self {
            GroupoidElement::Pair { target, .. } => target.clone(),
            GroupoidElement::Group(_) => Vec::new(),
            GroupoidElement::Action { g, x } => mat_vec(g, x),
        }
    }

    /// Identity at `x` of the same kind of groupoid as `self`.
    pub fn unit_like(&self, x: &[f64]) -> GroupoidElement {
        match self {
            GroupoidElement::Pair { .. } => GroupoidElement::Pair { target: x.to_vec(), source: x.to_vec() },
            GroupoidElement::Group(m) => GroupoidElement::Group(DMatrix::identity(m.nrows(), m.ncols())),
            GroupoidElement::Action { g, .. } => {
                GroupoidElement::Action { g: DMatrix::identity(g.nrows(), g.ncols()), x: x.to_vec() }
            }
        }
    }

    /// `self · other`, defined when `s(self) = t(other)` within `tol`.
    pub fn compose(&self, other: &GroupoidElement, tol: f64) -> Result<GroupoidElement, FlowError> {
        let gap = sup_dist(&self.source(), &other.target());
        if gap > tol {
            return Err(FlowError::NotComposable { gap });
        }
        match (self, other) {
            (GroupoidElement::Pair { target, .. }, GroupoidElement::Pair { source, .. }) => {
                Ok(GroupoidElement::Pair { target: target.clone(), source: source.clone() })
            }
            (GroupoidElement::Group(a), GroupoidElement::Group(b)) => Ok(GroupoidElement::Group(a * b)),
            (GroupoidElement::Action { g, .. }, GroupoidElement::Action { g: h, x }) => {
                Ok(GroupoidElement::Action { g: g * h, x: x.clone() })
            }
            _ => Err(FlowError::KindMismatch),
        }
    }

    pub fn inverse(&self) -> GroupoidElement {
        match self {
            GroupoidElement::Pair { target, source } => {
                GroupoidElement::Pair { target: source.clone(), source: target.clone() }
            }
            GroupoidElement::Group(m) => GroupoidElement::Group(m.clone().try_inverse().expect("group element is invertible")),
            GroupoidElement::Action { g, x } => GroupoidElement::Action {
                g: g.clone().try_inverse().expect("group element is invertible"),
                x: mat_vec(g, x),
            },
        }
    }

    /// Sup-norm distance; infinite across kinds or shapes.
    pub fn distance(&self, other: &GroupoidElement) -> f64 {
        match (self, other) {
            (GroupoidElement::Pair { target: a, source: b }, GroupoidElement::Pair { target: c, source: d })
                if a.len() == c.len() && b.len() == d.len() =>
            {
                sup_dist(a, c).max(sup_dist(b, d))
            }
            (GroupoidElement::Group(a), GroupoidElement::Group(b)) if a.shape() == b.shape() => mat_dist(a, b),
            (GroupoidElement::Action { g, x }, GroupoidElement::Action { g: h, x: y })
                if g.shape() == h.shape() && x.len() == y.len() =>
            {
                mat_dist(g, h).max(sup_dist(x, y))
            }
            _ => f64::INFINITY,
        }
    }

    /// Distance to the unit at the source.
    pub fn distance_to_unit(&self) -> f64 {
        self.distance(&self.unit_like(&self.source()))
    }

    /// Image in the pair groupoid: `(t, s)`.
    pub fn to_pair(&self) -> GroupoidElement {
        GroupoidElement::Pair { target: self.target(), source: self.source() }
    }

    pub fn to_json(&self) -> Value {
        let mat = |m: &DMatrix<f64>| -> Vec<Vec<f64>> { (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect() };
        match self {
            GroupoidElement::Pair { target, source } => json!({"kind": "pair", "target": target, "source": source}),
            GroupoidElement::Group(m) => json!({"kind": "group", "matrix": mat(m)}),
            GroupoidElement::Action { g, x } => {
                json!({"kind": "action", "g": mat(g), "source": x, "target": mat_vec(g, x)})
            }
        }
    }
}

/// `‖gᵀg − I‖∞`, the defect from orthogonality.
pub fn orthogonality_defect(g: &DMatrix<f64>) -> f64 {
    let id = DMatrix::<f64>::identity(g.nrows(), g.ncols());
    mat_dist(&(g.transpose() * g), &id)
}
