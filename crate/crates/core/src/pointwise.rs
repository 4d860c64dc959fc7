//! Pointwise invariants: the evaluation image `Bₓ`, the fiber `ℬₓ = ℬ/Iₓℬ`,
//! the isotropy algebra `𝔟ₓ` and the exact sequence `0 → 𝔟ₓ → ℬₓ → Bₓ → 0`.
//!
//! With generators `g₁…g_k`, `ℬ/Iₓℬ = ℚᵏ / Sₓ` where `Sₓ` is spanned by the
//! syzygy generators evaluated at `x`: tensoring `Syz → Rᵏ → ℬ → 0` with
//! `R/Iₓ` is right exact, so relations among the classes of the `gᵢ` modulo
//! `Iₓℬ` are exactly evaluated syzygies.

use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::geometry::{jacobi_violation, AmbientAlgebroid, GeometryError, SingularSubalgebroid};
use crate::linalg;
use crate::poly::{format_rational, parse_rational, AlgebraError, FreeModuleElem, Poly, Rational};

use num::{One, Zero};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PointwiseError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("point has {found} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("malformed point `{0}`")]
    MalformedPoint(String),
    #[error("no sample points")]
    NoPoints,
    #[error("candidate {0} is not a member of the module")]
    NotMember(usize),
    #[error("candidates do not induce a basis of the fiber: {0}")]
    NotABasis(String),
    #[error("rank jump along the leaf between samples {first} and {second}: {detail}")]
    LeafRankViolation { first: usize, second: usize, detail: String },
    #[error("operation requires the tangent ambient")]
    NotTangent,
}

/// Parse `p/q` components separated by commas; the empty string is the point of `ℝ⁰`.
pub fn parse_point(s: &str) -> Result<Vec<Rational>, PointwiseError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|c| parse_rational(c).ok_or_else(|| PointwiseError::MalformedPoint(s.to_string())))
        .collect()
}

pub fn format_point(p: &[Rational]) -> String {
    p.iter().map(format_rational).collect::<Vec<_>>().join(",")
}

fn check_point(b: &SingularSubalgebroid, x: &[Rational]) -> Result<(), PointwiseError> {
    if x.len() != b.base_dim() {
        return Err(PointwiseError::DimensionMismatch { expected: b.base_dim(), found: x.len() });
    }
    Ok(())
}

fn eval_coeffs(coeffs: &[Poly], x: &[Rational]) -> Vec<Rational> {
    coeffs.iter().map(|p| p.eval(x)).collect()
}

/// Row basis of the evaluated syzygies `Sₓ ⊂ ℚᵏ`.
pub fn evaluated_syzygies(b: &SingularSubalgebroid, x: &[Rational]) -> Result<Vec<Vec<Rational>>, PointwiseError> {
    check_point(b, x)?;
    let k = b.num_generators();
    let rows: Vec<Vec<Rational>> = b.module().syzygies().iter().map(|s| eval_coeffs(s, x)).collect();
    Ok(linalg::row_basis(&rows, k))
}

/// `dim ℬₓ` alone.
pub fn fiber_dimension(b: &SingularSubalgebroid, x: &[Rational]) -> Result<usize, PointwiseError> {
    Ok(b.num_generators() - evaluated_syzygies(b, x)?.len())
}

fn evaluation_rows(b: &SingularSubalgebroid, x: &[Rational]) -> Result<Vec<Vec<Rational>>, PointwiseError> {
    // row a of the evaluation matrix ℚᵏ → Aₓ
    let k = b.num_generators();
    let mut rows = vec![vec![Rational::zero(); k]; b.rank()];
    for (i, g) in b.generators().iter().enumerate() {
        for (a, v) in g.evaluate(x)?.into_iter().enumerate() {
            rows[a][i] = v;
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiberReport {
    pub point: Vec<Rational>,
    pub dim_ev: usize,
    pub dim_fiber: usize,
    pub dim_isotropy: usize,
    /// Generator indices whose classes form a basis of `ℬₓ`.
    pub fiber_basis: Vec<usize>,
    /// Coefficient vectors over the generators, one per isotropy basis element.
    pub isotropy_basis: Vec<Vec<Rational>>,
    /// `structure_constants[i][j][k]` with `[bᵢ, bⱼ] = Σ c_ijᵏ b_k`.
    pub structure_constants: Vec<Vec<Vec<Rational>>>,
}

impl FiberReport {
    pub fn ses_holds(&self) -> bool {
        self.dim_fiber == self.dim_ev + self.dim_isotropy
    }

    /// Antisymmetry and Jacobi of the isotropy structure constants.
    pub fn isotropy_is_lie(&self) -> bool {
        let c = &self.structure_constants;
        let m = c.len();
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    if c[i][j][k] != -c[j][i][k].clone() {
                        return false;
                    }
                }
            }
        }
        jacobi_violation(c).is_none()
    }

    /// Nonzero constants as `(i, j, k, c)` with `i < j`.
    pub fn sparse_constants(&self) -> Vec<(usize, usize, usize, Rational)> {
        let m = self.structure_constants.len();
        let mut out = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                for k in 0..m {
                    let c = &self.structure_constants[i][j][k];
                    if !c.is_zero() {
                        out.push((i, j, k, c.clone()));
                    }
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "point": self.point.iter().map(format_rational).collect::<Vec<_>>(),
            "dim_ev": self.dim_ev,
            "dim_fiber": self.dim_fiber,
            "dim_isotropy": self.dim_isotropy,
            "fiber_basis": self.fiber_basis,
            "isotropy_basis": self.isotropy_basis.iter()
                .map(|v| v.iter().map(format_rational).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "structure_constants": self.sparse_constants().into_iter()
                .map(|(i, j, k, c)| json!([i, j, k, format_rational(&c)]))
                .collect::<Vec<_>>(),
            "verdicts": {
                "exact_sequence": self.ses_holds(),
                "isotropy_is_lie": self.isotropy_is_lie(),
            },
        })
    }
}

/// Exact fiber data at a rational point. Requires an involutive module.
pub fn fiber_report(b: &SingularSubalgebroid, x: &[Rational]) -> Result<FiberReport, PointwiseError> {
    check_point(b, x)?;
    b.require_involutive()?;
    let k = b.num_generators();
    let syz = evaluated_syzygies(b, x)?;
    let units: Vec<Vec<Rational>> = (0..k)
        .map(|i| {
            let mut v = vec![Rational::zero(); k];
            v[i] = Rational::one();
            v
        })
        .collect();
    let fiber_basis = linalg::extend_independent(&syz, &units);
    let ev = evaluation_rows(b, x)?;
    let dim_ev = linalg::rank(&ev);
    let kernel = linalg::nullspace(&ev, k);
    let chosen = linalg::extend_independent(&syz, &kernel);
    let isotropy_basis: Vec<Vec<Rational>> = chosen.iter().map(|&i| kernel[i].clone()).collect();
    let m = isotropy_basis.len();

    let mut structure_constants = vec![vec![vec![Rational::zero(); m]; m]; m];
    if m > 1 {
        let reps: Vec<FreeModuleElem> = isotropy_basis.iter().map(|c| combination(b, c)).collect();
        let mut span = syz.clone();
        span.extend(isotropy_basis.iter().cloned());
        for i in 0..m {
            for j in i + 1..m {
                let br = b.bracket(&reps[i], &reps[j])?;
                let (rem, cert) = b.module().normal_form(&br)?;
                debug_assert!(rem.is_zero());
                let target = eval_coeffs(&cert, x);
                let coeffs = linalg::solve_in_span(&span, &target)
                    .expect("bracket of isotropy elements lies in the isotropy");
                for (kk, c) in coeffs[syz.len()..].iter().enumerate() {
                    structure_constants[i][j][kk] = c.clone();
                    structure_constants[j][i][kk] = -c.clone();
                }
            }
        }
    }

    Ok(FiberReport {
        point: x.to_vec(),
        dim_ev,
        dim_fiber: k - syz.len(),
        dim_isotropy: m,
        fiber_basis,
        isotropy_basis,
        structure_constants,
    })
}

fn combination(b: &SingularSubalgebroid, c: &[Rational]) -> FreeModuleElem {
    let n = b.base_dim();
    let coeffs: Vec<Poly> = c.iter().map(|v| Poly::constant(n, v.clone())).collect();
    b.module().combine(&coeffs)
}

/// Fiber reports over a list of points, evaluated in parallel; output order follows input order.
pub fn fiber_reports(b: &SingularSubalgebroid, points: &[Vec<Rational>]) -> Result<Vec<FiberReport>, PointwiseError> {
    b.require_involutive()?;
    points.par_iter().map(|x| fiber_report(b, x)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProjectivityVerdict {
    /// Every sampled fiber has this dimension.
    Projective { rank: usize },
    /// Indices of two samples with different fiber dimensions.
    NonProjective { first: usize, second: usize },
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectivityReport {
    pub points: Vec<Vec<Rational>>,
    pub dims: Vec<usize>,
    pub verdict: ProjectivityVerdict,
}

impl ProjectivityReport {
    /// Holonomy groupoid smoothness follows the projectivity verdict.
    pub fn smoothness(&self) -> String {
        match &self.verdict {
            ProjectivityVerdict::Projective { rank } => {
                format!("H^G(B) is a Lie groupoid with source-fiber dimension {rank} (sampled)")
            }
            ProjectivityVerdict::NonProjective { .. } => "H^G(B) is not a Lie groupoid (fiber dimension jumps)".into(),
            ProjectivityVerdict::Inconclusive => "undetermined: fewer than two samples".into(),
        }
    }

    pub fn to_json(&self) -> Value {
        let verdict = match &self.verdict {
            ProjectivityVerdict::Projective { rank } => json!({"kind": "projective", "rank": rank, "sampled": true}),
            ProjectivityVerdict::NonProjective { first, second } => json!({
                "kind": "non-projective",
                "witness": [format_point(&self.points[*first]), format_point(&self.points[*second])],
                "dims": [self.dims[*first], self.dims[*second]],
            }),
            ProjectivityVerdict::Inconclusive => json!({"kind": "inconclusive"}),
        };
        json!({
            "points": self.points.iter().map(|p| format_point(p)).collect::<Vec<_>>(),
            "dims": self.dims,
            "verdict": verdict,
            "smoothness": self.smoothness(),
        })
    }
}

/// Compare fiber dimensions over the samples.
pub fn projectivity_scan(b: &SingularSubalgebroid, points: &[Vec<Rational>]) -> Result<ProjectivityReport, PointwiseError> {
    if points.is_empty() {
        return Err(PointwiseError::NoPoints);
    }
    for p in points {
        check_point(b, p)?;
    }
    let dims = points.par_iter().map(|x| fiber_dimension(b, x)).collect::<Result<Vec<_>, _>>()?;
    let verdict = if let Some(j) = dims.iter().position(|d| *d != dims[0]) {
        ProjectivityVerdict::NonProjective { first: 0, second: j }
    } else if points.len() < 2 {
        ProjectivityVerdict::Inconclusive
    } else {
        ProjectivityVerdict::Projective { rank: dims[0] }
    };
    Ok(ProjectivityReport { points: points.to_vec(), dims, verdict })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalGeneratorsReport {
    /// Candidates generate the whole module (global surrogate for a neighborhood of `x`).
    pub generates: bool,
    /// First original generator outside the span of the candidates.
    pub missing: Option<usize>,
    /// Samples (including `x`) have equal fiber dimension.
    pub projective_on_probes: bool,
    /// Per probe: do the candidate classes form a basis there?
    pub probe_bases: Vec<bool>,
}

impl LocalGeneratorsReport {
    pub fn pass(&self) -> bool {
        self.generates && (!self.projective_on_probes || self.probe_bases.iter().all(|b| *b))
    }

    pub fn to_json(&self, probes: &[Vec<Rational>]) -> Value {
        json!({
            "pass": self.pass(),
            "generates": self.generates,
            "missing_generator": self.missing,
            "projective_on_probes": self.projective_on_probes,
            "probes": probes.iter().zip(&self.probe_bases)
                .map(|(p, ok)| json!({"point": format_point(p), "basis": ok}))
                .collect::<Vec<_>>(),
            "scope": "global membership plus finite probes",
        })
    }
}

/// Classes of the candidates in `ℬₓ`, as coordinates in `ℚᵏ`.
fn candidate_classes(certs: &[Vec<Poly>], x: &[Rational]) -> Vec<Vec<Rational>> {
    certs.iter().map(|c| eval_coeffs(c, x)).collect()
}

fn is_fiber_basis(b: &SingularSubalgebroid, certs: &[Vec<Poly>], x: &[Rational]) -> Result<bool, PointwiseError> {
    let syz = evaluated_syzygies(b, x)?;
    let dim = b.num_generators() - syz.len();
    let classes = candidate_classes(certs, x);
    Ok(classes.len() == dim && linalg::extend_independent(&syz, &classes).len() == dim)
}

/// Do candidates inducing a basis of `ℬₓ` generate the module?
pub fn local_generators_check(
    b: &SingularSubalgebroid,
    x: &[Rational],
    candidates: &[FreeModuleElem],
    probes: &[Vec<Rational>],
) -> Result<LocalGeneratorsReport, PointwiseError> {
    check_point(b, x)?;
    let mut certs = Vec::with_capacity(candidates.len());
    for (i, c) in candidates.iter().enumerate() {
        let (rem, cert) = b.module().normal_form(c)?;
        if !rem.is_zero() {
            return Err(PointwiseError::NotMember(i));
        }
        certs.push(cert);
    }
    if !is_fiber_basis(b, &certs, x)? {
        return Err(PointwiseError::NotABasis(format!(
            "{} candidates, fiber dimension {}",
            candidates.len(),
            fiber_dimension(b, x)?
        )));
    }
    let sub = b.with_generators(candidates.to_vec())?;
    let mut missing = None;
    for (i, g) in b.generators().iter().enumerate() {
        if !sub.contains(g)? {
            missing = Some(i);
            break;
        }
    }
    let dx = fiber_dimension(b, x)?;
    let mut projective_on_probes = true;
    let mut probe_bases = Vec::with_capacity(probes.len());
    for p in probes {
        check_point(b, p)?;
        projective_on_probes &= fiber_dimension(b, p)? == dx;
        probe_bases.push(is_fiber_basis(b, &certs, p)?);
    }
    Ok(LocalGeneratorsReport { generates: missing.is_none(), missing, projective_on_probes, probe_bases })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeafRankReport {
    pub samples: Vec<FiberReport>,
    /// Rank of the transitive subalgebroid `B_L` (the evaluation image).
    pub rank_evaluation: usize,
    /// Rank of the transitive algebroid `ℬ_L` (the fibers).
    pub rank_fiber: usize,
}

impl LeafRankReport {
    pub fn to_json(&self) -> Value {
        json!({
            "rank_B_L": self.rank_evaluation,
            "rank_fiber_L": self.rank_fiber,
            "samples": self.samples.iter().map(FiberReport::to_json).collect::<Vec<_>>(),
            "scope": "sampled",
        })
    }
}

/// Constant-rank check over samples asserted to lie on one leaf.
pub fn leaf_rank_report(b: &SingularSubalgebroid, samples: &[Vec<Rational>]) -> Result<LeafRankReport, PointwiseError> {
    if samples.is_empty() {
        return Err(PointwiseError::NoPoints);
    }
    let reports = fiber_reports(b, samples)?;
    for (i, r) in reports.iter().enumerate() {
        if !r.ses_holds() {
            return Err(PointwiseError::LeafRankViolation { first: i, second: i, detail: "exact sequence fails".into() });
        }
        let r0 = &reports[0];
        if r.dim_ev != r0.dim_ev || r.dim_fiber != r0.dim_fiber {
            return Err(PointwiseError::LeafRankViolation {
                first: 0,
                second: i,
                detail: format!(
                    "(dim_ev, dim_fiber) = ({}, {}) at {} but ({}, {}) at {}",
                    r0.dim_ev,
                    r0.dim_fiber,
                    format_point(&r0.point),
                    r.dim_ev,
                    r.dim_fiber,
                    format_point(&r.point)
                ),
            });
        }
    }
    let (rank_evaluation, rank_fiber) = (reports[0].dim_ev, reports[0].dim_fiber);
    Ok(LeafRankReport { samples: reports, rank_evaluation, rank_fiber })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PullbackReport {
    pub dim_base: usize,
    pub dim_pullback: usize,
}

impl PullbackReport {
    pub fn pass(&self) -> bool {
        self.dim_base == self.dim_pullback
    }
}

/// On the pair groupoid `M×M`, the module generated by `gᵢ(first factor) ⊕ 0`
/// has the same fiber dimension at `(x, y)` as `ℬ` at `x`.
pub fn pullback_dim_check(b: &SingularSubalgebroid, x: &[Rational], y: &[Rational]) -> Result<PullbackReport, PointwiseError> {
    if !crate::geometry::is_tangent(b) {
        return Err(PointwiseError::NotTangent);
    }
    check_point(b, x)?;
    check_point(b, y)?;
    let n = b.base_dim();
    let gens: Vec<FreeModuleElem> = b.generators().iter().map(|g| g.embed(2 * n, 0).pad(2 * n)).collect();
    let mut vars: Vec<String> = b.vars().to_vec();
    vars.extend(b.vars().iter().map(|v| format!("{v}_")));
    let lifted = SingularSubalgebroid::new(AmbientAlgebroid::tangent(2 * n), vars, gens, b.config().clone())?;
    let mut xy = x.to_vec();
    xy.extend_from_slice(y);
    Ok(PullbackReport { dim_base: fiber_dimension(b, x)?, dim_pullback: fiber_dimension(&lifted, &xy)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{default_vars, parse, subalgebroid_over_submanifold};
    use crate::poly::rat;

    fn pt(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&a| rat(a, 1)).collect()
    }

    fn vanish() -> SingularSubalgebroid {
        subalgebroid_over_submanifold(AmbientAlgebroid::tangent(2), default_vars(2), 0, 0).unwrap().checked().unwrap()
    }

    #[test]
    fn square_field_fibers() {
        let b = parse("vars: x\ngenerators:\n - x^2*dx").unwrap().checked().unwrap();
        let r0 = fiber_report(&b, &pt(&[0])).unwrap();
        assert_eq!((r0.dim_ev, r0.dim_isotropy, r0.dim_fiber), (0, 1, 1));
        assert!(r0.structure_constants[0][0][0].is_zero());
        let r1 = fiber_report(&b, &pt(&[1])).unwrap();
        assert_eq!((r1.dim_ev, r1.dim_isotropy, r1.dim_fiber), (1, 0, 1));
    }

    #[test]
    fn vanishing_module_fibers() {
        let b = vanish();
        let r = fiber_report(&b, &pt(&[0, 0])).unwrap();
        assert_eq!((r.dim_fiber, r.dim_ev, r.dim_isotropy), (4, 0, 4));
        assert!(r.isotropy_is_lie());
        let r = fiber_report(&b, &pt(&[1, 0])).unwrap();
        assert_eq!((r.dim_fiber, r.dim_ev, r.dim_isotropy), (2, 2, 0));
    }

    #[test]
    fn projectivity() {
        let hyper = subalgebroid_over_submanifold(AmbientAlgebroid::tangent(2), default_vars(2), 1, 1).unwrap();
        let pts = vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1]), pt(&[3, -2])];
        let r = projectivity_scan(&hyper, &pts).unwrap();
        assert_eq!(r.verdict, ProjectivityVerdict::Projective { rank: 2 });
        let r = projectivity_scan(&vanish(), &[pt(&[0, 0]), pt(&[1, 0])]).unwrap();
        assert_eq!(r.verdict, ProjectivityVerdict::NonProjective { first: 0, second: 1 });
        assert_eq!(r.dims, vec![4, 2]);
        let rot = parse("vars: x y\ngenerators:\n - -y*dx + x*dy").unwrap();
        let r = projectivity_scan(&rot, &pts).unwrap();
        assert_eq!(r.verdict, ProjectivityVerdict::Projective { rank: 1 });
        assert!(r.smoothness().contains("dimension 1"));
        assert_eq!(projectivity_scan(&rot, &pts[..1]).unwrap().verdict, ProjectivityVerdict::Inconclusive);
    }

    #[test]
    fn local_generators() {
        let b = parse("vars: x\ngenerators:\n - x*dx").unwrap();
        let r = local_generators_check(&b, &pt(&[0]), b.generators(), &[]).unwrap();
        assert!(r.pass());

        let hyper = subalgebroid_over_submanifold(AmbientAlgebroid::tangent(2), default_vars(2), 1, 1).unwrap();
        let probes = vec![pt(&[0, 0]), pt(&[2, 0]), pt(&[1, 1]), pt(&[-1, 3])];
        let r = local_generators_check(&hyper, &pt(&[1, 0]), hyper.generators(), &probes).unwrap();
        assert!(r.projective_on_probes && r.probe_bases.iter().all(|b| *b) && r.pass());

        let v = vanish();
        let cands = vec![v.generators()[0].clone(), v.generators()[2].clone()];
        let r = local_generators_check(&v, &pt(&[1, 0]), &cands, &[]).unwrap();
        assert!(!r.generates);
        assert_eq!(r.missing, Some(1));
        assert!(matches!(
            local_generators_check(&v, &pt(&[0, 0]), &cands, &[]),
            Err(PointwiseError::NotABasis(_))
        ));
    }

    #[test]
    fn leaf_ranks() {
        let rot = parse("vars: x y\ngenerators:\n - -y*dx + x*dy").unwrap();
        let circle = vec![pt(&[1, 0]), pt(&[0, 1]), vec![rat(3, 5), rat(4, 5)]];
        let r = leaf_rank_report(&rot, &circle).unwrap();
        assert_eq!((r.rank_evaluation, r.rank_fiber), (1, 1));
        let r = leaf_rank_report(&rot, &[pt(&[0, 0])]).unwrap();
        assert_eq!((r.rank_evaluation, r.rank_fiber), (0, 1));
        let sq = parse("vars: x\ngenerators:\n - x^2*dx").unwrap();
        let r = leaf_rank_report(&sq, &[pt(&[1]), pt(&[2]), vec![rat(1, 2)]]).unwrap();
        assert_eq!((r.rank_evaluation, r.rank_fiber), (1, 1));
        assert!(matches!(
            leaf_rank_report(&sq, &[pt(&[1]), pt(&[0])]),
            Err(PointwiseError::LeafRankViolation { first: 0, second: 1, .. })
        ));
    }

    #[test]
    fn pullback_dims() {
        let sq = parse("vars: x\ngenerators:\n - x^2*dx").unwrap();
        let r = pullback_dim_check(&sq, &pt(&[0]), &pt(&[3])).unwrap();
        assert_eq!((r.dim_base, r.dim_pullback), (1, 1));
        let v = vanish();
        let r = pullback_dim_check(&v, &pt(&[0, 0]), &pt(&[1, 1])).unwrap();
        assert_eq!((r.dim_base, r.dim_pullback), (4, 4));
        let r = pullback_dim_check(&v, &pt(&[2, 1]), &pt(&[0, 0])).unwrap();
        assert_eq!((r.dim_base, r.dim_pullback), (2, 2));
    }

    #[test]
    fn lie_algebra_fiber_is_the_subalgebra() {
        let b = parse("vars:\nambient: liealgebra so3\ngenerators:\n - e1\n - e2\n - e3").unwrap();
        let r = fiber_report(&b, &[]).unwrap();
        assert_eq!((r.dim_fiber, r.dim_ev, r.dim_isotropy), (3, 3, 0));
    }

    #[test]
    fn points() {
        assert_eq!(parse_point("1/2,-3").unwrap(), vec![rat(1, 2), rat(-3, 1)]);
        assert_eq!(parse_point("").unwrap(), Vec::<Rational>::new());
        assert!(parse_point("1,,2").is_err());
        assert_eq!(format_point(&[rat(1, 2), rat(-3, 1)]), "1/2,-3");
    }
}
