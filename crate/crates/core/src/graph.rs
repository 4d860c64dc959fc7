//! The graph of a singular foliation as a same-leaf oracle, and the two graph
//! counterexamples: over-differentiation under the subspace diffeology and
//! failure of openness for a non-free action.

use std::collections::{HashMap, VecDeque};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::flows::{flow, golden_min, mat_vec, matrix_exp, to_dmatrix, CompiledField, FlowConfig, FlowError};
use crate::geometry::{AmbientAlgebroid, AmbientKind, GeometryError, SingularSubalgebroid};
use crate::poly::{FreeModuleElem, Poly, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("family {0} does not start at the identity")]
    NotIdentityAtZero(usize),
    #[error("family {index} has {found} components, expected {expected}")]
    FamilyShape { index: usize, expected: usize, found: usize },
    #[error("invalid arc: {0}")]
    InvalidArc(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    /// Maximum number of node expansions.
    pub budget: usize,
    /// Radius of the visited balls used for pruning.
    pub visit_radius: f64,
    /// Control durations are `±2^{-j}` for `j = 0..=max_halvings`.
    pub max_halvings: u32,
    /// Nodes this close to a target try a single-generator homing leg.
    pub capture_radius: f64,
    /// A path is accepted when it ends this close to the target.
    pub accept_tol: f64,
    /// Nodes farther than this from the origin are pruned; `None` uses
    /// `10·(1 + max(|p|∞, |q|∞))`.
    pub region_radius: Option<f64>,
    pub flow: FlowConfig,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget: 100_000,
            visit_radius: 1e-3,
            max_halvings: 6,
            capture_radius: 0.5,
            accept_tol: 1e-8,
            region_radius: None,
            flow: FlowConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub generator: usize,
    pub duration: f64,
    pub sign: i8,
}

impl Segment {
    fn time(&self) -> f64 {
        self.sign as f64 * self.duration
    }
}

/// Piecewise flow of the anchored generators from `start`, ending at `end`.
#[derive(Clone, Debug, PartialEq)]
pub struct LeafPath {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    pub segments: Vec<Segment>,
    /// Distance between the integrated endpoint and the requested target.
    pub max_deviation: f64,
}

impl LeafPath {
    /// Integrate the segments again from `start`.
    pub fn replay(&self, fields: &[CompiledField], cfg: &FlowConfig) -> Result<Vec<f64>, FlowError> {
        let mut x = self.start.clone();
        for s in &self.segments {
            x = flow(&fields[s.generator], &x, s.time(), cfg)?;
        }
        Ok(x)
    }

    pub fn reversed(&self) -> LeafPath {
        LeafPath {
            start: self.end.clone(),
            end: self.start.clone(),
            segments: self
                .segments
                .iter()
                .rev()
                .map(|s| Segment { generator: s.generator, duration: s.duration, sign: -s.sign })
                .collect(),
            max_deviation: self.max_deviation,
        }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &LeafPath) -> LeafPath {
        let mut segments = self.segments.clone();
        segments.extend(next.segments.iter().cloned());
        LeafPath {
            start: self.start.clone(),
            end: next.end.clone(),
            segments,
            max_deviation: self.max_deviation + next.max_deviation,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "start": self.start,
            "end": self.end,
            "max_deviation": self.max_deviation,
            "segments": self.segments.iter()
                .map(|s| json!({"generator": s.generator, "duration": s.duration, "sign": s.sign}))
                .collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LeafVerdict {
    Yes(LeafPath),
    /// Budget exhausted or reachable set explored without meeting the target.
    Unknown { expanded: usize, escapes: usize },
}

impl LeafVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, LeafVerdict::Yes(_))
    }

    pub fn to_json(&self) -> Value {
        match self {
            LeafVerdict::Yes(p) => json!({"verdict": "yes", "path": p.to_json()}),
            LeafVerdict::Unknown { expanded, escapes } => {
                json!({"verdict": "unknown", "expanded": expanded, "escaped_flows": escapes})
            }
        }
    }
}

/// Vector fields `ρ(gᵢ)` of the generators.
pub fn anchored_fields(b: &SingularSubalgebroid) -> Result<Vec<CompiledField>, GraphError> {
    b.generators()
        .iter()
        .map(|g| Ok(CompiledField::new(b.ambient().anchor(g)?.components())))
        .collect()
}

fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (u, v)| m.max((u - v).abs()))
}

fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

struct Visited {
    r: f64,
    cells: HashMap<Vec<i64>, Vec<Vec<f64>>>,
}

impl Visited {
    fn key(&self, x: &[f64]) -> Vec<i64> {
        x.iter().map(|v| (v / self.r).floor() as i64).collect()
    }

    /// Insert unless a point within `r` is already present.
    fn insert(&mut self, x: &[f64]) -> bool {
        let key = self.key(x);
        let n = key.len();
        let offsets = if n <= 3 { 3usize.pow(n as u32) } else { 1 };
        for o in 0..offsets {
            let mut k = key.clone();
            let mut rem = o;
            if n <= 3 {
                for c in k.iter_mut() {
                    *c += (rem % 3) as i64 - 1;
                    rem /= 3;
                }
            }
            if let Some(pts) = self.cells.get(&k) {
                if pts.iter().any(|p| sup_dist(p, x) < self.r) {
                    return false;
                }
            }
        }
        self.cells.entry(key).or_default().push(x.to_vec());
        true
    }
}

struct Node {
    x: Vec<f64>,
    parent: Option<usize>,
    seg: Option<Segment>,
}

fn path_to(nodes: &[Node], mut i: usize) -> Vec<Segment> {
    let mut segs = Vec::new();
    while let Some(p) = nodes[i].parent {
        segs.push(nodes[i].seg.clone().unwrap());
        i = p;
    }
    segs.reverse();
    segs
}

/// Best single-generator leg from `x` towards `q`: a coarse scan of
/// durations in `[−2, 2]` followed by golden-section refinement.
fn home(fields: &[CompiledField], x: &[f64], q: &[f64], cfg: &FlowConfig) -> Option<(Segment, Vec<f64>, f64)> {
    let mut best: Option<(Segment, Vec<f64>, f64)> = None;
    for (gi, f) in fields.iter().enumerate() {
        let dist = |t: f64| -> Result<f64, FlowError> { Ok(sup_dist(&flow(f, x, t, cfg)?, q)) };
        let grid: Vec<f64> = (0..=64).map(|i| -2.0 + i as f64 / 16.0).collect();
        let vals: Vec<f64> = grid.iter().map(|&t| dist(t).unwrap_or(f64::INFINITY)).collect();
        let (imin, _) = vals.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
        let lo = grid[imin.saturating_sub(1)];
        let hi = grid[(imin + 1).min(grid.len() - 1)];
        let safe = |t: f64| -> Result<f64, FlowError> { Ok(dist(t).unwrap_or(f64::INFINITY)) };
        let Ok(t) = golden_min(&safe, lo, hi, 1e-15) else { continue };
        let Ok(y) = flow(f, x, t, cfg) else { continue };
        let d = sup_dist(&y, q);
        if best.as_ref().is_none_or(|b| d < b.2) {
            let seg = Segment { generator: gi, duration: t.abs(), sign: if t < 0.0 { -1 } else { 1 } };
            best = Some((seg, y, d));
        }
    }
    best
}

/// Search from `p` for each of `targets`. Paths are returned for the targets reached.
pub fn reach_many(
    b: &SingularSubalgebroid,
    p: &[f64],
    targets: &[Vec<f64>],
    cfg: &SearchConfig,
) -> Result<Vec<LeafVerdict>, GraphError> {
    let n = b.base_dim();
    if p.len() != n {
        return Err(GraphError::DimensionMismatch { expected: n, found: p.len() });
    }
    if let Some(q) = targets.iter().find(|q| q.len() != n) {
        return Err(GraphError::DimensionMismatch { expected: n, found: q.len() });
    }
    let fields = anchored_fields(b)?;
    let scale = targets.iter().fold(norm_inf(p), |m, q| m.max(norm_inf(q)));
    let region = cfg.region_radius.unwrap_or(10.0 * (1.0 + scale));
    let mut found: Vec<Option<LeafPath>> = vec![None; targets.len()];
    let mut best_home: Vec<f64> = vec![f64::INFINITY; targets.len()];
    let mut remaining = targets.len();
    for (ti, q) in targets.iter().enumerate() {
        if sup_dist(p, q) <= cfg.accept_tol {
            found[ti] = Some(LeafPath { start: p.to_vec(), end: p.to_vec(), segments: Vec::new(), max_deviation: sup_dist(p, q) });
            remaining -= 1;
        }
    }
    let durations: Vec<f64> = (0..=cfg.max_halvings).map(|j| 0.5f64.powi(j as i32)).collect();
    let mut visited = Visited { r: cfg.visit_radius, cells: HashMap::new() };
    visited.insert(p);
    let mut nodes = vec![Node { x: p.to_vec(), parent: None, seg: None }];
    let mut queue = VecDeque::from([0usize]);
    let mut expanded = 0;
    let mut escapes = 0;
    while remaining > 0 && expanded < cfg.budget {
        let Some(i) = queue.pop_front() else { break };
        expanded += 1;
        let x = nodes[i].x.clone();
        for (ti, q) in targets.iter().enumerate() {
            if found[ti].is_some() {
                continue;
            }
            let d = sup_dist(&x, q);
            if d < cfg.capture_radius && d < 0.9 * best_home[ti] {
                best_home[ti] = d;
                if let Some((seg, end, res)) = home(&fields, &x, q, &cfg.flow) {
                    if res <= cfg.accept_tol {
                        let mut segments = path_to(&nodes, i);
                        segments.push(seg);
                        found[ti] = Some(LeafPath { start: p.to_vec(), end, segments, max_deviation: res });
                        remaining -= 1;
                    }
                }
            }
        }
        if remaining == 0 {
            break;
        }
        for (gi, f) in fields.iter().enumerate() {
            for &d in &durations {
                for sign in [1i8, -1] {
                    match flow(f, &x, sign as f64 * d, &cfg.flow) {
                        Ok(y) => {
                            if norm_inf(&y) > region || !visited.insert(&y) {
                                continue;
                            }
                            nodes.push(Node { x: y, parent: Some(i), seg: Some(Segment { generator: gi, duration: d, sign }) });
                            queue.push_back(nodes.len() - 1);
                        }
                        Err(_) => escapes += 1,
                    }
                }
            }
        }
    }
    Ok(found
        .into_iter()
        .map(|f| match f {
            Some(path) => LeafVerdict::Yes(path),
            None => LeafVerdict::Unknown { expanded, escapes },
        })
        .collect())
}

/// Semi-decision of `p ~ q`: `Yes` carries a replayable path; never answers no.
pub fn same_leaf(b: &SingularSubalgebroid, p: &[f64], q: &[f64], cfg: &SearchConfig) -> Result<LeafVerdict, GraphError> {
    Ok(reach_many(b, p, &[q.to_vec()], cfg)?.pop().unwrap())
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphComparison {
    pub grid: Vec<Vec<f64>>,
    /// `first[i][j]` is the verdict of the first module on `(grid[i], grid[j])`.
    pub first: Vec<Vec<LeafVerdict>>,
    pub second: Vec<Vec<LeafVerdict>>,
}

impl GraphComparison {
    fn pairs(&self) -> impl Iterator<Item = (usize, usize, bool, bool)> + '_ {
        let m = self.grid.len();
        (0..m * m).map(move |ij| {
            let (i, j) = (ij / m, ij % m);
            (i, j, self.first[i][j].is_yes(), self.second[i][j].is_yes())
        })
    }

    pub fn agreements(&self) -> usize {
        self.pairs().filter(|p| p.2 && p.3).count()
    }

    pub fn unknowns(&self) -> usize {
        self.pairs().filter(|p| !p.2 && !p.3).count()
    }

    pub fn disagreements(&self) -> Vec<(usize, usize)> {
        self.pairs().filter(|p| p.2 != p.3).map(|p| (p.0, p.1)).collect()
    }

    /// Every path found by either module.
    pub fn paths(&self) -> impl Iterator<Item = (bool, &LeafPath)> {
        let first = self.first.iter().flatten().map(|v| (true, v));
        let second = self.second.iter().flatten().map(|v| (false, v));
        first.chain(second).filter_map(|(f, v)| match v {
            LeafVerdict::Yes(p) => Some((f, p)),
            LeafVerdict::Unknown { .. } => None,
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "grid": self.grid,
            "agreements": self.agreements(),
            "unknowns": self.unknowns(),
            "disagreements": self.disagreements().iter()
                .map(|&(i, j)| json!([self.grid[i], self.grid[j]]))
                .collect::<Vec<_>>(),
        })
    }
}

/// Compare same-leaf verdicts of two modules over all grid pairs.
pub fn graph_equal_sample(
    b1: &SingularSubalgebroid,
    b2: &SingularSubalgebroid,
    grid: &[Vec<f64>],
    cfg: &SearchConfig,
) -> Result<GraphComparison, GraphError> {
    if b1.base_dim() != b2.base_dim() {
        return Err(GraphError::DimensionMismatch { expected: b1.base_dim(), found: b2.base_dim() });
    }
    let rows = |b: &SingularSubalgebroid| -> Result<Vec<Vec<LeafVerdict>>, GraphError> {
        grid.par_iter().map(|p| reach_many(b, p, grid, cfg)).collect()
    };
    Ok(GraphComparison { grid: grid.to_vec(), first: rows(b1)?, second: rows(b2)? })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceDerivative {
    /// `d/dλ|₀ c_λ` as a section of `TM`.
    pub section: FreeModuleElem,
    pub member: bool,
    /// Every sampled `(x, c_λ(x))` was joined by a leaf path.
    pub preserves_leaves: bool,
}

impl SubspaceDerivative {
    pub fn to_json(&self, vars: &[String]) -> Value {
        json!({
            "derivative": self.section.display_with(vars),
            "member": self.member,
            "preserves_sampled_leaves": self.preserves_leaves,
        })
    }
}

/// For families `c_λ(x)` polynomial in `(l, x…)` (variable 0 is `l`) with
/// `c_0 = id`, return `d/dλ|₀ c_λ` and decide membership in `b`. Leaf
/// preservation is validated with the same-leaf search at `samples` for
/// `λ ∈ lambdas`.
pub fn subspace_diffeology_differentiation(
    b: &SingularSubalgebroid,
    families: &[Vec<Poly>],
    samples: &[Vec<f64>],
    lambdas: &[f64],
    cfg: &SearchConfig,
) -> Result<Vec<SubspaceDerivative>, GraphError> {
    let n = b.base_dim();
    let zero = Rational::from_integer(0.into());
    let mut out = Vec::with_capacity(families.len());
    for (fi, fam) in families.iter().enumerate() {
        if fam.len() != n || fam.iter().any(|p| p.nvars() != n + 1) {
            return Err(GraphError::FamilyShape { index: fi, expected: n, found: fam.len() });
        }
        for (i, c) in fam.iter().enumerate() {
            if c.substitute(0, &zero).drop_var(0) != Poly::var(n, i) {
                return Err(GraphError::NotIdentityAtZero(fi));
            }
        }
        let comps: Vec<Poly> = fam.iter().map(|c| c.derivative(0).substitute(0, &zero).drop_var(0)).collect();
        let section = FreeModuleElem::new(n, comps);
        let member = b.contains(&section)?;
        let mut preserves = true;
        'outer: for x in samples {
            for &l in lambdas {
                let mut pt = vec![l];
                pt.extend_from_slice(x);
                let y: Vec<f64> = fam.iter().map(|c| c.eval_f64(&pt)).collect();
                if !same_leaf(b, x, &y, cfg)?.is_yes() {
                    preserves = false;
                    break 'outer;
                }
            }
        }
        out.push(SubspaceDerivative { section, member, preserves_leaves: preserves });
    }
    Ok(out)
}

/// Open arc `(lo, hi)` of angles; `hi − lo ≥ 2π` is the whole circle.
#[derive(Clone, Debug, PartialEq)]
pub struct Arc {
    pub lo: f64,
    pub hi: f64,
}

impl Arc {
    pub fn full(&self) -> bool {
        self.hi - self.lo >= 2.0 * std::f64::consts::PI
    }

    pub fn contains(&self, theta: f64) -> bool {
        if self.full() {
            return true;
        }
        let tau = 2.0 * std::f64::consts::PI;
        let t = (theta - self.lo).rem_euclid(tau);
        t > 0.0 && t < self.hi - self.lo
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessCheck {
    pub g: f64,
    pub origin_in_saturation: bool,
    /// `(ε, in saturation)` for the points `(g, (ε, 0, …))`.
    pub nearby: Vec<(f64, bool)>,
}

impl WitnessCheck {
    pub fn holds(&self) -> bool {
        self.origin_in_saturation && self.nearby.iter().all(|(_, inside)| !inside)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OpennessReport {
    pub samples_checked: usize,
    /// Samples `(θ, x)` where computed and predicted saturation disagree.
    pub mismatches: Vec<(f64, Vec<f64>)>,
    pub witnesses: Vec<WitnessCheck>,
}

impl OpennessReport {
    pub fn saturation_identity(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn pass(&self) -> bool {
        self.saturation_identity() && !self.witnesses.is_empty() && self.witnesses.iter().all(WitnessCheck::holds)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "pass": self.pass(),
            "samples_checked": self.samples_checked,
            "saturation_identity": self.saturation_identity(),
            "mismatches": self.mismatches.iter().map(|(t, x)| json!({"theta": t, "x": x})).collect::<Vec<_>>(),
            "witnesses": self.witnesses.iter().map(|w| json!({
                "g": w.g,
                "origin_in_saturation": w.origin_in_saturation,
                "nearby": w.nearby.iter().map(|(e, inside)| json!({"epsilon": e, "in_saturation": inside})).collect::<Vec<_>>(),
                "holds": w.holds(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Rotation action `θ ↦ exp(θM)` of a rank-1 linear action.
struct Rotation {
    m: DMatrix<f64>,
}

impl Rotation {
    fn act(&self, theta: f64, x: &[f64]) -> Vec<f64> {
        mat_vec(&matrix_exp(&(&self.m * theta)), x)
    }

    /// `(g, x) ∈ Φ⁻¹(Φ(G¹×M))`: some `h ∈ G¹` has `h·x = g·x`. Arc search: a
    /// dense scan of the arc and golden-section refinement of the best cell.
    fn in_saturation(&self, arc: &Arc, g: f64, x: &[f64], tol: f64) -> bool {
        if arc.contains(g) {
            return true;
        }
        let gx = self.act(g, x);
        let (lo, hi) = if arc.full() { (0.0, 2.0 * std::f64::consts::PI) } else { (arc.lo, arc.hi) };
        let cells = 720;
        let step = (hi - lo) / cells as f64;
        let d = |h: f64| -> Result<f64, FlowError> { Ok(sup_dist(&self.act(h, x), &gx)) };
        let (imin, vmin) = (1..cells)
            .map(|i| (i, d(lo + i as f64 * step).unwrap()))
            .fold((1, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
        if vmin <= tol {
            return true;
        }
        let a = lo + (imin as f64 - 1.0) * step;
        let b = lo + (imin as f64 + 1.0) * step;
        let h = golden_min(&d, a.max(lo + 1e-12), b.min(hi - 1e-12), 1e-14).unwrap();
        d(h).unwrap() <= tol
    }
}

/// Check `Φ⁻¹(Φ(G¹×M)) = (G¹×(M∖{0})) ⊔ (G×{0})` on samples of `G×S`, and the
/// witnesses `(g, 0)` in the saturation with `(g, (ε,0,…))` outside for `g ∉ G¹`.
pub fn openness_counterexample(
    action: &AmbientAlgebroid,
    arc: &Arc,
    samples: &[Vec<f64>],
    angles: &[f64],
    witness_angles: &[f64],
    epsilons: &[f64],
) -> Result<OpennessReport, GraphError> {
    if !matches!(action.kind(), AmbientKind::LinearAction { .. }) || action.rank() != 1 {
        return Err(GraphError::InvalidArc("expected a rank-1 linear action".into()));
    }
    if !arc.contains(0.0) {
        return Err(GraphError::InvalidArc("arc must contain the identity".into()));
    }
    let n = action.base_dim();
    if let Some(s) = samples.iter().find(|s| s.len() != n) {
        return Err(GraphError::DimensionMismatch { expected: n, found: s.len() });
    }
    let rot = Rotation { m: to_dmatrix(&action.matrices()[0]) };
    let tol = 1e-9;
    let pairs: Vec<(f64, Vec<f64>)> =
        angles.iter().flat_map(|&t| samples.iter().map(move |x| (t, x.clone()))).collect();
    let mismatches: Vec<(f64, Vec<f64>)> = pairs
        .par_iter()
        .filter(|(t, x)| {
            let predicted = arc.contains(*t) || norm_inf(x) == 0.0;
            rot.in_saturation(arc, *t, x, tol * (1.0 + norm_inf(x))) != predicted
        })
        .cloned()
        .collect();
    let mut witnesses = Vec::new();
    if !arc.full() {
        for &g in witness_angles {
            if arc.contains(g) {
                continue;
            }
            let origin = vec![0.0; n];
            let nearby = epsilons
                .iter()
                .map(|&e| {
                    let mut x = vec![0.0; n];
                    x[0] = e;
                    (e, rot.in_saturation(arc, g, &x, tol * e.min(1.0)))
                })
                .collect();
            witnesses.push(WitnessCheck { g, origin_in_saturation: rot.in_saturation(arc, g, &origin, tol), nearby });
        }
    }
    Ok(OpennessReport { samples_checked: pairs.len(), mismatches, witnesses })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{dsl::parse_poly, parse};
    use std::f64::consts::PI;

    fn sq() -> SingularSubalgebroid {
        parse("vars: x\ngenerators:\n - x^2*dx").unwrap()
    }

    #[test]
    fn square_field_leaves() {
        let cfg = SearchConfig::default();
        let v = same_leaf(&sq(), &[1.0], &[2.0], &cfg).unwrap();
        let LeafVerdict::Yes(path) = v else { panic!("expected a path") };
        let fields = anchored_fields(&sq()).unwrap();
        let end = path.replay(&fields, &FlowConfig::with_tol(1e-11)).unwrap();
        assert!((end[0] - 2.0).abs() < 1e-6);
        let small = SearchConfig { budget: 2_000, ..SearchConfig::default() };
        assert!(!same_leaf(&sq(), &[1.0], &[-1.0], &small).unwrap().is_yes());
        let refl = same_leaf(&sq(), &[0.7], &[0.7], &cfg).unwrap();
        assert!(matches!(refl, LeafVerdict::Yes(ref p) if p.segments.is_empty()));
    }

    #[test]
    fn rotation_paths_reverse_and_concatenate() {
        let rot = parse("vars: x y\ngenerators:\n - -y*dx + x*dy").unwrap();
        let fields = anchored_fields(&rot).unwrap();
        let cfg = SearchConfig::default();
        let a = [1.0, 0.0];
        let b = [0.0, 1.0];
        let c = [-0.6, -0.8];
        let LeafVerdict::Yes(ab) = same_leaf(&rot, &a, &b, &cfg).unwrap() else { panic!() };
        let LeafVerdict::Yes(bc) = same_leaf(&rot, &b, &c, &cfg).unwrap() else { panic!() };
        let back = ab.reversed().replay(&fields, &cfg.flow).unwrap();
        assert!(sup_dist(&back, &a) < 1e-7);
        let ac = ab.then(&bc).replay(&fields, &cfg.flow).unwrap();
        assert!(sup_dist(&ac, &c) < 1e-7);
        let small = SearchConfig { budget: 3_000, ..SearchConfig::default() };
        assert!(!same_leaf(&rot, &a, &[2.0, 0.0], &small).unwrap().is_yes());
    }

    #[test]
    fn translation_joins_opposite_signs() {
        let lin = parse("vars: x\ngenerators:\n - x*dx").unwrap();
        let tr = parse("vars: x\ngenerators:\n - dx").unwrap();
        let grid = vec![vec![-1.0], vec![0.0], vec![1.0]];
        let cfg = SearchConfig { budget: 5_000, ..SearchConfig::default() };
        let cmp = graph_equal_sample(&lin, &tr, &grid, &cfg).unwrap();
        assert!(cmp.disagreements().contains(&(0, 2)));
        let same = graph_equal_sample(&lin, &lin, &grid, &cfg).unwrap();
        assert!(same.disagreements().is_empty());
    }

    #[test]
    fn subspace_derivatives() {
        let b = sq();
        let vars: Vec<String> = vec!["l".into(), "x".into()];
        let fams = vec![
            vec![parse_poly("(1 + l)*x", &vars).unwrap()],
            vec![parse_poly("x", &vars).unwrap()],
        ];
        let cfg = SearchConfig { budget: 2_000, ..SearchConfig::default() };
        let r = subspace_diffeology_differentiation(&b, &fams, &[vec![0.5], vec![-1.0]], &[0.1, -0.1], &cfg).unwrap();
        assert_eq!(r[0].section, FreeModuleElem::new(1, vec![Poly::var(1, 0)]));
        assert!(!r[0].member && r[0].preserves_leaves);
        assert!(r[1].section.is_zero() && r[1].member);
        let bad = vec![vec![parse_poly("x + 1", &vars).unwrap()]];
        assert!(matches!(
            subspace_diffeology_differentiation(&b, &bad, &[], &[], &cfg),
            Err(GraphError::NotIdentityAtZero(0))
        ));
    }

    #[test]
    fn openness_witness() {
        let so2 = AmbientAlgebroid::named_action("so2").unwrap();
        let arc = Arc { lo: -PI / 4.0, hi: PI / 4.0 };
        let samples = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 0.5], vec![-0.3, 0.4]];
        let angles: Vec<f64> = (0..12).map(|i| i as f64 * PI / 6.0 + 0.01).collect();
        let r = openness_counterexample(&so2, &arc, &samples, &angles, &[PI / 2.0, PI, 1.5 * PI], &[1e-1, 1e-2, 1e-3]).unwrap();
        assert!(r.saturation_identity(), "{:?}", r.mismatches);
        assert_eq!(r.witnesses.len(), 3);
        assert!(r.pass());
        let full = Arc { lo: -PI, hi: PI };
        let r = openness_counterexample(&so2, &full, &samples, &angles, &[PI], &[1e-1]).unwrap();
        assert!(r.saturation_identity() && r.witnesses.is_empty() && !r.pass());
    }
}
