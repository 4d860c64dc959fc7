//! Chart presentations of bisubmersions, parametrized by `(λ, x)` with `x`
//! the source.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::flows::{Domain, ExpMap, FlowConfig, GroupoidElement};
use crate::geometry::SingularSubalgebroid;

use super::HolonomyError;

#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    PathHolonomy { generators: Vec<usize> },
    Action { generators: Vec<usize> },
    Composed(Box<Provenance>, Box<Provenance>),
    Inverse(Box<Provenance>),
}

impl Provenance {
    pub fn describe(&self) -> String {
        match self {
            Provenance::PathHolonomy { generators } => format!("path-holonomy{generators:?}"),
            Provenance::Action { generators } => format!("action{generators:?}"),
            Provenance::Composed(a, b) => format!("({} ∘ {})", a.describe(), b.describe()),
            Provenance::Inverse(a) => format!("inverse({})", a.describe()),
        }
    }

    /// Number of path-holonomy or action charts composed.
    pub fn depth(&self) -> usize {
        match self {
            Provenance::PathHolonomy { .. } | Provenance::Action { .. } => 1,
            Provenance::Composed(a, b) => a.depth() + b.depth(),
            Provenance::Inverse(a) => a.depth(),
        }
    }
}

#[derive(Clone, Debug)]
enum Node {
    /// `(λ, x) ↦ exp_x(sign·Σ λᵢ αᵢ)` on `λ ∈ params`, `x ∈ base`.
    Exp { exp: ExpMap, sign: f64, params: Domain, base: Domain },
    /// `(p₁, p₂, x) ↦ φ₁(p₁, t(φ₂(p₂, x))) · φ₂(p₂, x)`.
    Compose(Box<Node>, Box<Node>),
}

impl Node {
    fn k(&self) -> usize {
        match self {
            Node::Exp { params, .. } => params.dim(),
            Node::Compose(a, b) => a.k() + b.k(),
        }
    }

    fn base(&self) -> &Domain {
        match self {
            Node::Exp { base, .. } => base,
            Node::Compose(_, b) => b.base(),
        }
    }

    fn inverse(&self) -> Node {
        match self {
            Node::Exp { exp, sign, params, base } => {
                Node::Exp { exp: exp.clone(), sign: -sign, params: params.clone(), base: base.clone() }
            }
            Node::Compose(a, b) => Node::Compose(Box::new(b.inverse()), Box::new(a.inverse())),
        }
    }

    fn eval(&self, p: &[f64], x: &[f64], cfg: &FlowConfig, tol: f64) -> Result<GroupoidElement, HolonomyError> {
        match self {
            Node::Exp { exp, sign, params, base } => {
                if !base.contains(x) || !(params.dim() == 0 || params.contains(p)) {
                    return Err(HolonomyError::OutsideChart);
                }
                let l: Vec<f64> = p.iter().map(|v| sign * v).collect();
                Ok(exp.exp(&l, x, cfg)?)
            }
            Node::Compose(a, b) => {
                let (pa, pb) = p.split_at(a.k());
                let eb = b.eval(pb, x, cfg, tol)?;
                let ea = a.eval(pa, &eb.target(), cfg, tol)?;
                Ok(ea.compose(&eb, tol)?)
            }
        }
    }
}

/// A bisubmersion presented by an evaluator into the integrating groupoid.
#[derive(Clone, Debug)]
pub struct Chart {
    node: Node,
    provenance: Provenance,
    cfg: FlowConfig,
    /// Matching tolerance for compositions.
    tol: f64,
    /// Points `(λ, x)` of the chart used for sampled checks.
    samples: Vec<(Vec<f64>, Vec<f64>)>,
}

fn sample_box(rng: &mut ChaCha8Rng, d: &Domain, shrink: f64) -> Vec<f64> {
    d.lo.iter()
        .zip(&d.hi)
        .map(|(l, h)| {
            // unbounded directions are sampled in (−1, 1)
            let (c, r) = if l.is_finite() && h.is_finite() { ((l + h) / 2.0, (h - l) / 2.0 * shrink) } else { (0.0, 1.0) };
            c + r * rng.gen_range(-1.0..1.0)
        })
        .collect()
}

impl Chart {
    /// Path-holonomy chart of the selected generators over `λ ∈ params`, `x ∈ base`.
    pub fn path_holonomy(
        b: &SingularSubalgebroid,
        generators: &[usize],
        params: Domain,
        base: Domain,
        cfg: FlowConfig,
        seed: u64,
    ) -> Result<Chart, HolonomyError> {
        let sections: Vec<_> = generators
            .iter()
            .map(|&i| b.generators().get(i).cloned().ok_or(HolonomyError::ParameterCount { expected: b.num_generators(), found: i + 1 }))
            .collect::<Result<_, _>>()?;
        if params.dim() != generators.len() {
            return Err(HolonomyError::ParameterCount { expected: generators.len(), found: params.dim() });
        }
        let exp = ExpMap::new(b.ambient(), &sections)?;
        let node = Node::Exp { exp, sign: 1.0, params, base };
        let mut chart = Chart {
            node,
            provenance: Provenance::PathHolonomy { generators: generators.to_vec() },
            cfg,
            tol: 1e-6,
            samples: Vec::new(),
        };
        chart.samples = chart.draw_samples(8, seed);
        Ok(chart)
    }

    pub(crate) fn from_exp(exp: ExpMap, params: Domain, base: Domain, provenance: Provenance, cfg: FlowConfig, seed: u64) -> Chart {
        let node = Node::Exp { exp, sign: 1.0, params, base };
        let mut chart = Chart { node, provenance, cfg, tol: 1e-6, samples: Vec::new() };
        chart.samples = chart.draw_samples(8, seed);
        chart
    }

    fn draw_samples(&self, n: usize, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(n);
        let mut leaves = Vec::new();
        collect_leaves(&self.node, &mut leaves);
        for _ in 0..n {
            let p: Vec<f64> = leaves.iter().flat_map(|d| sample_box(&mut rng, d, 0.9)).collect();
            let x = sample_box(&mut rng, self.node.base(), 0.9);
            out.push((p, x));
        }
        out
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Number of parameters `k`.
    pub fn k(&self) -> usize {
        self.node.k()
    }

    pub fn base(&self) -> &Domain {
        self.node.base()
    }

    pub fn samples(&self) -> &[(Vec<f64>, Vec<f64>)] {
        &self.samples
    }

    pub fn config(&self) -> &FlowConfig {
        &self.cfg
    }

    pub fn is_path_holonomy(&self) -> bool {
        matches!(self.provenance, Provenance::PathHolonomy { .. })
    }

    pub fn evaluate(&self, p: &[f64], x: &[f64]) -> Result<GroupoidElement, HolonomyError> {
        if p.len() != self.k() {
            return Err(HolonomyError::ParameterCount { expected: self.k(), found: p.len() });
        }
        self.node.eval(p, x, &self.cfg, self.tol)
    }

    pub fn target(&self, p: &[f64], x: &[f64]) -> Result<Vec<f64>, HolonomyError> {
        Ok(self.evaluate(p, x)?.target())
    }

    /// `κ(λ, x) = (−λ, t(λ, x))`; defined for path-holonomy charts.
    pub fn kappa(&self, p: &[f64], x: &[f64]) -> Result<(Vec<f64>, Vec<f64>), HolonomyError> {
        if !self.is_path_holonomy() {
            return Err(HolonomyError::NotPathHolonomy);
        }
        Ok((p.iter().map(|v| -v).collect(), self.target(p, x)?))
    }

    /// Numerical rank of the Jacobian of the target map in `(λ, x)`.
    pub fn target_jacobian_rank(&self, p: &[f64], x: &[f64], h: f64) -> Result<usize, HolonomyError> {
        let n = x.len();
        let k = p.len();
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(k + n);
        for j in 0..k + n {
            let (mut pp, mut pm, mut xp, mut xm) = (p.to_vec(), p.to_vec(), x.to_vec(), x.to_vec());
            if j < k {
                pp[j] += h;
                pm[j] -= h;
            } else {
                xp[j - k] += h;
                xm[j - k] -= h;
            }
            let tp = self.target(&pp, &xp)?;
            let tm = self.target(&pm, &xm)?;
            cols.push(tp.iter().zip(&tm).map(|(a, b)| (a - b) / (2.0 * h)).collect());
        }
        let m = nalgebra::DMatrix::from_fn(n, k + n, |i, j| cols[j][i]);
        Ok(m.rank(1e-6))
    }

    pub fn to_json(&self) -> Value {
        let mut leaves = Vec::new();
        collect_leaves(&self.node, &mut leaves);
        let boxes: Vec<Value> = leaves.iter().map(|d| json!({"lo": d.lo, "hi": d.hi})).collect();
        let table: Vec<Value> = self
            .samples
            .iter()
            .map(|(p, x)| {
                let phi = self.evaluate(p, x).map(|e| e.to_json()).unwrap_or(Value::Null);
                json!({"lambda": p, "x": x, "phi": phi})
            })
            .collect();
        json!({
            "provenance": self.provenance.describe(),
            "k": self.k(),
            "box": {"parameters": boxes, "base": {"lo": self.base().lo, "hi": self.base().hi}},
            "samples": table,
        })
    }
}

fn collect_leaves<'a>(node: &'a Node, out: &mut Vec<&'a Domain>) {
    match node {
        Node::Exp { params, .. } => out.push(params),
        Node::Compose(a, b) => {
            collect_leaves(a, out);
            collect_leaves(b, out);
        }
    }
}

/// `U₁ ∘ U₂`: points `(p₁, p₂, x)` with `t₂(p₂, x)` in the base of `U₁`.
pub fn compose_charts(u1: &Chart, u2: &Chart) -> Result<Chart, HolonomyError> {
    let mut samples = Vec::new();
    for (p2, x) in &u2.samples {
        let Ok(t) = u2.target(p2, x) else { continue };
        if !u1.base().contains(&t) {
            continue;
        }
        for (p1, _) in &u1.samples {
            let mut p = p1.clone();
            p.extend_from_slice(p2);
            samples.push((p, x.clone()));
            if samples.len() >= 8 {
                break;
            }
        }
        if samples.len() >= 8 {
            break;
        }
    }
    if samples.is_empty() {
        return Err(HolonomyError::EmptyFiberedProduct);
    }
    Ok(Chart {
        node: Node::Compose(Box::new(u1.node.clone()), Box::new(u2.node.clone())),
        provenance: Provenance::Composed(Box::new(u1.provenance.clone()), Box::new(u2.provenance.clone())),
        cfg: u1.cfg.clone(),
        tol: u1.tol.max(u2.tol),
        samples,
    })
}

/// Sampled deviation `max |φ(κ(λ,x)) − φ(λ,x)⁻¹|` for a path-holonomy chart.
pub fn kappa_defect(u: &Chart) -> Result<f64, HolonomyError> {
    let mut worst = 0.0_f64;
    for (p, x) in &u.samples {
        let (kp, kx) = u.kappa(p, x)?;
        let lhs = u.evaluate(&kp, &kx);
        let rhs = u.evaluate(p, x)?.inverse();
        match lhs {
            Ok(l) => worst = worst.max(l.distance(&rhs)),
            Err(HolonomyError::OutsideChart) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(worst)
}

/// The inverse chart `ι∘φ`. For path-holonomy charts the κ identity is
/// verified on the samples; failure beyond `tol` is an error.
pub fn invert_chart(u: &Chart, tol: f64) -> Result<Chart, HolonomyError> {
    if u.is_path_holonomy() {
        let d = kappa_defect(u)?;
        if d > tol {
            return Err(HolonomyError::KappaMismatch { defect: d });
        }
    }
    let node = u.node.inverse();
    let mut samples = Vec::with_capacity(u.samples.len());
    for (p, x) in &u.samples {
        if let Ok(t) = u.target(p, x) {
            if node.base().contains(&t) {
                samples.push((reverse_blocks(&u.node, p), t));
            }
        }
    }
    let provenance = match &u.provenance {
        Provenance::Inverse(inner) => (**inner).clone(),
        other => Provenance::Inverse(Box::new(other.clone())),
    };
    Ok(Chart { node, provenance, cfg: u.cfg.clone(), tol: u.tol, samples })
}

/// Parameter layout of the inverse node: blocks in reverse order.
fn reverse_blocks(node: &Node, p: &[f64]) -> Vec<f64> {
    match node {
        Node::Exp { .. } => p.to_vec(),
        Node::Compose(a, b) => {
            let (pa, pb) = p.split_at(a.k());
            let mut out = reverse_blocks(b, pb);
            out.extend(reverse_blocks(a, pa));
            out
        }
    }
}

/// Charts closed under inverse and composition up to a depth bound.
#[derive(Clone, Debug)]
pub struct Atlas {
    pub charts: Vec<Chart>,
    pub depth: usize,
}

impl Atlas {
    /// Start from `base` charts, add inverses, then all compositions of total depth ≤ `depth`.
    pub fn generate(base: Vec<Chart>, depth: usize, tol: f64) -> Result<Atlas, HolonomyError> {
        let mut level1 = Vec::new();
        for c in base {
            let inv = invert_chart(&c, tol)?;
            level1.push(c);
            level1.push(inv);
        }
        let mut charts = level1.clone();
        let mut frontier = level1.clone();
        for _ in 1..depth {
            let mut next = Vec::new();
            for a in &level1 {
                for b in &frontier {
                    match compose_charts(a, b) {
                        Ok(c) => next.push(c),
                        Err(HolonomyError::EmptyFiberedProduct) => {}
                        Err(e) => return Err(e),
                    }
                }
            }
            charts.extend(next.iter().cloned());
            frontier = next;
        }
        Ok(Atlas { charts, depth })
    }

    /// Does every base sample lie in the source image of some chart?
    pub fn covers(&self, points: &[Vec<f64>]) -> bool {
        points.iter().all(|x| self.charts.iter().any(|c| c.base().contains(x)))
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.charts.iter().map(Chart::to_json).collect())
    }
}
