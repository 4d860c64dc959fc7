//! Differentiation of chart-presented groupoids back to sections, and probes
//! of the integral axioms on path-holonomy charts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::flows::{flow, BisectionFamily, CompiledField, Domain, ExpMap, FlowConfig, FlowError, GroupoidElement};
use crate::geometry::{GeometryError, SingularSubalgebroid};
use crate::poly::{AlgebraError, FreeModuleElem, Poly, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiffError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("family has {found} coefficients, expected one per generator ({expected})")]
    CoefficientCount { expected: usize, found: usize },
    #[error("coefficient {0} does not vanish at l = 0")]
    NonzeroAtZero(usize),
    #[error("coefficient {index} has {found} variables, expected {expected}")]
    VariableCount { index: usize, expected: usize, found: usize },
    #[error("finite differences deviate by {deviation:e} from the symbolic derivative (refinement {refinement:?})")]
    NumericalInconsistency { deviation: f64, refinement: Vec<(f64, f64)> },
}

impl From<AlgebraError> for DiffError {
    fn from(e: AlgebraError) -> Self {
        DiffError::Geometry(e.into())
    }
}

/// Bisection family `x ↦ (f(λ, x), x)` of the path-holonomy chart over the
/// generators. Coefficients are polynomials in `(l, x…)` with `l` first.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    pub coefficients: Vec<Poly>,
    pub domain: Domain,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiffConfig {
    /// Central-difference steps, largest first.
    pub steps: Vec<f64>,
    pub tol: f64,
    /// Sample points per axis of the domain box.
    pub per_axis: usize,
    pub flow: FlowConfig,
}

impl Default for DiffConfig {
    fn default() -> Self {
        DiffConfig { steps: vec![4e-2, 2e-2, 1e-2, 5e-3], tol: 1e-3, per_axis: 3, flow: FlowConfig::with_tol(1e-12) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DifferentiationResult {
    pub section: FreeModuleElem,
    /// `gᵢ = ∂_l fᵢ(0, ·)`, the coefficients of the section in the generators.
    pub certificate: Vec<Poly>,
    pub member: bool,
    pub samples: Vec<Vec<f64>>,
    /// `(h, max deviation)` for each step.
    pub refinement: Vec<(f64, f64)>,
    pub max_deviation: f64,
    /// Fitted slope of `log deviation` against `log h`, absent when the
    /// deviations are at rounding level.
    pub order: Option<f64>,
}

impl DifferentiationResult {
    pub fn to_json(&self, vars: &[String]) -> Value {
        json!({
            "section": self.section.display_with(vars),
            "certificate": self.certificate.iter().map(|p| p.display_with(vars)).collect::<Vec<_>>(),
            "member": self.member,
            "samples": self.samples,
            "refinement": self.refinement.iter().map(|(h, d)| json!({"h": h, "deviation": d})).collect::<Vec<_>>(),
            "max_deviation": self.max_deviation,
            "order": self.order,
        })
    }
}

/// `lo + (hi − lo)(i + 1)/(m + 1)` on each axis.
pub fn interior_grid(domain: &Domain, per_axis: usize) -> Vec<Vec<f64>> {
    let n = domain.dim();
    let mut pts = vec![Vec::with_capacity(n)];
    for a in 0..n {
        let (lo, hi) = (domain.lo[a], domain.hi[a]);
        pts = pts
            .into_iter()
            .flat_map(|p| {
                (0..per_axis).map(move |i| {
                    let mut q = p.clone();
                    q.push(lo + (hi - lo) * (i + 1) as f64 / (per_axis + 1) as f64);
                    q
                })
            })
            .collect();
    }
    pts
}

fn slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|&(_, d)| d < 1e-11) {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Some(cov / var)
}

fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (u, v)| m.max((u - v).abs()))
}

/// `d/dλ|₀ Φ∘b_λ = Σ ∂_l fᵢ(0, ·) gᵢ`, cross-checked by central differences of
/// the chart at an interior grid of the domain.
pub fn differentiate_family(
    b: &SingularSubalgebroid,
    spec: &FamilySpec,
    cfg: &DiffConfig,
) -> Result<DifferentiationResult, DiffError> {
    let n = b.base_dim();
    let k = b.num_generators();
    if spec.coefficients.len() != k {
        return Err(DiffError::CoefficientCount { expected: k, found: spec.coefficients.len() });
    }
    if spec.domain.dim() != n {
        return Err(FlowError::DimensionMismatch { expected: n, found: spec.domain.dim() }.into());
    }
    let zero = Rational::from_integer(0.into());
    for (i, f) in spec.coefficients.iter().enumerate() {
        if f.nvars() != n + 1 {
            return Err(DiffError::VariableCount { index: i, expected: n + 1, found: f.nvars() });
        }
        if !f.substitute(0, &zero).is_zero() {
            return Err(DiffError::NonzeroAtZero(i));
        }
    }
    let certificate: Vec<Poly> = spec.coefficients.iter().map(|f| f.derivative(0).substitute(0, &zero).drop_var(0)).collect();
    let section = b.module().combine(&certificate);
    let member = b.contains(&section)?;
    let exp = ExpMap::for_generators(b)?;
    let samples = interior_grid(&spec.domain, cfg.per_axis);
    let at = |l: f64, x: &[f64]| -> Result<GroupoidElement, FlowError> {
        let mut pt = vec![l];
        pt.extend_from_slice(x);
        let params: Vec<f64> = spec.coefficients.iter().map(|f| f.eval_f64(&pt)).collect();
        exp.exp(&params, x, &cfg.flow)
    };
    let mut refinement = Vec::with_capacity(cfg.steps.len());
    for &h in &cfg.steps {
        let devs: Vec<f64> = samples
            .par_iter()
            .map(|x| -> Result<f64, FlowError> {
                let v = exp.frame_velocity(&at(h, x)?, &at(-h, x)?, h);
                Ok(sup_dist(&v, &section.evaluate_f64(x)))
            })
            .collect::<Result<_, _>>()?;
        refinement.push((h, devs.into_iter().fold(0.0, f64::max)));
    }
    let max_deviation = refinement.last().map_or(0.0, |r| r.1);
    if max_deviation > cfg.tol {
        return Err(DiffError::NumericalInconsistency { deviation: max_deviation, refinement });
    }
    let order = slope(&refinement);
    Ok(DifferentiationResult { section, certificate, member, samples, refinement, max_deviation, order })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryReport {
    /// Maximal deviation per generator.
    pub deviations: Vec<f64>,
    pub samples: usize,
    pub tol: f64,
}

impl RecoveryReport {
    pub fn max_deviation(&self) -> f64 {
        self.deviations.iter().copied().fold(0.0, f64::max)
    }

    pub fn pass(&self) -> bool {
        self.max_deviation() <= self.tol
    }

    pub fn to_json(&self) -> Value {
        json!({
            "deviations": self.deviations,
            "samples": self.samples,
            "max_deviation": self.max_deviation(),
            "tol": self.tol,
            "pass": self.pass(),
        })
    }
}

/// For each generator `α`, the derivative at `λ = 0` of its 1-parameter group
/// of bisections, compared with `α` on `grid`.
pub fn recover_generators(
    b: &SingularSubalgebroid,
    domain: &Domain,
    grid: &[Vec<f64>],
    h: f64,
    tol: f64,
    cfg: FlowConfig,
) -> Result<RecoveryReport, DiffError> {
    b.require_involutive()?;
    let deviations = b
        .generators()
        .iter()
        .map(|alpha| -> Result<f64, DiffError> {
            let fam = crate::flows::one_parameter_group(b, alpha, domain.clone(), cfg.clone())?;
            let devs: Vec<f64> = grid
                .par_iter()
                .filter(|x| domain.contains(x))
                .map(|x| Ok(sup_dist(&fam.derivative(x, h)?, &alpha.evaluate_f64(x))))
                .collect::<Result<_, FlowError>>()?;
            Ok(devs.into_iter().fold(0.0, f64::max))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RecoveryReport { deviations, samples: grid.len(), tol })
}

#[derive(Clone, Debug, PartialEq)]
pub enum InjectivityVerdict {
    Pass,
    /// A non-zero parameter carries the identity because the chart's
    /// generators are linearly dependent there; the chart, not the groupoid, collapses.
    RedundantChart { witness: Vec<f64> },
    Fail { witness: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct InjectivityReport {
    pub tested: usize,
    pub carrying_identity: usize,
    pub verdict: InjectivityVerdict,
}

impl InjectivityReport {
    pub fn to_json(&self) -> Value {
        let (verdict, witness) = match &self.verdict {
            InjectivityVerdict::Pass => ("pass", None),
            InjectivityVerdict::RedundantChart { witness } => ("redundant_chart", Some(witness)),
            InjectivityVerdict::Fail { witness } => ("fail", Some(witness)),
        };
        json!({"tested": self.tested, "carrying_identity": self.carrying_identity, "verdict": verdict, "witness": witness})
    }
}

/// Constant bisections `x ↦ (λ, x)` over a symmetric grid of `(−r, r)ᵏ` (with
/// `per_axis` odd so `0` is included) for the chart over `generators`. Those
/// carrying the identity on `ball` must be the zero parameter.
pub fn almost_injectivity_probe(
    b: &SingularSubalgebroid,
    generators: &[usize],
    ball: &[Vec<f64>],
    r: f64,
    per_axis: usize,
    tol: f64,
    cfg: &FlowConfig,
) -> Result<InjectivityReport, DiffError> {
    let sections: Vec<FreeModuleElem> = generators.iter().map(|&i| b.generators()[i].clone()).collect();
    let exp = ExpMap::new(b.ambient(), &sections)?;
    let k = sections.len();
    let params = interior_grid(&Domain::cube(k, r), per_axis);
    let carrying: Vec<Vec<f64>> = params
        .par_iter()
        .filter_map(|l| {
            let moved = ball.iter().try_fold(0.0_f64, |m, x| Ok::<_, FlowError>(m.max(exp.exp(l, x, cfg)?.distance_to_unit())));
            match moved {
                Ok(d) if d <= tol => Some(l.clone()),
                _ => None,
            }
        })
        .collect();
    let anchors: Vec<CompiledField> =
        sections.iter().map(|s| Ok(CompiledField::new(b.ambient().anchor(s)?.components()))).collect::<Result<_, GeometryError>>()?;
    let mut verdict = InjectivityVerdict::Pass;
    for l in &carrying {
        if l.iter().all(|v| v.abs() <= tol) {
            continue;
        }
        let frame = sections.iter().zip(l).fold(vec![0.0; b.rank()], |mut acc, (s, &c)| {
            for x in ball {
                for (a, v) in acc.iter_mut().zip(s.evaluate_f64(x)) {
                    *a += c * v;
                }
            }
            acc
        });
        let field = CompiledField::combination(&anchors, l);
        let dependent = frame.iter().all(|v| v.abs() <= tol) && ball.iter().all(|x| field.eval(x).iter().all(|v| v.abs() <= tol));
        verdict = if dependent {
            InjectivityVerdict::RedundantChart { witness: l.clone() }
        } else {
            InjectivityVerdict::Fail { witness: l.clone() }
        };
        if !dependent {
            break;
        }
    }
    Ok(InjectivityReport { tested: params.len(), carrying_identity: carrying.len(), verdict })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupLawReport {
    pub tested: usize,
    /// Triples where `x` or `t(b_μ(x))` leaves the domain.
    pub skipped: usize,
    pub max_deviation: f64,
    pub tol: f64,
}

impl GroupLawReport {
    pub fn pass(&self) -> bool {
        self.tested > 0 && self.max_deviation <= self.tol
    }

    pub fn to_json(&self) -> Value {
        json!({
            "tested": self.tested,
            "skipped": self.skipped,
            "max_deviation": self.max_deviation,
            "tol": self.tol,
            "pass": self.pass(),
        })
    }
}

/// `b_{λ+μ}(x) = (b_λ ∗ b_μ)(x)` on `count` seeded triples with `λ, μ` in
/// half the interval and `x` in the domain.
pub fn group_law_probe(fam: &BisectionFamily, count: usize, seed: u64, tol: f64) -> Result<GroupLawReport, DiffError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = fam.interval();
    let dom = fam.domain();
    let triples: Vec<(f64, f64, Vec<f64>)> = (0..count)
        .map(|_| {
            let l = rng.gen_range(lo / 2.0..hi / 2.0);
            let m = rng.gen_range(lo / 2.0..hi / 2.0);
            let x = (0..dom.dim()).map(|a| rng.gen_range(dom.lo[a].max(-1e3)..dom.hi[a].min(1e3))).collect();
            (l, m, x)
        })
        .collect();
    let results: Vec<Option<f64>> = triples
        .par_iter()
        .map(|(l, m, x)| -> Result<Option<f64>, FlowError> {
            let first = fam.evaluate(*m, x)?;
            if !dom.contains(x) || !dom.contains(&first.target()) {
                return Ok(None);
            }
            let lhs = fam.evaluate(l + m, x)?;
            let rhs = fam.product(*l, *m, x, 1e-6)?;
            Ok(Some(lhs.distance(&rhs)))
        })
        .collect::<Result<_, _>>()?;
    let tested = results.iter().flatten().count();
    Ok(GroupLawReport {
        tested,
        skipped: count - tested,
        max_deviation: results.iter().flatten().copied().fold(0.0, f64::max),
        tol,
    })
}

/// Random family `l·p(x) + l²·q(x)` per generator, with `p, q` of degree ≤ 2
/// and small integer coefficients.
pub fn random_family(b: &SingularSubalgebroid, domain: Domain, rng: &mut impl Rng) -> FamilySpec {
    let n = b.base_dim();
    let random_poly = |rng: &mut dyn rand::RngCore| {
        let mut p = Poly::zero(n + 1);
        for _ in 0..3 {
            let mut m = Poly::one(n + 1);
            for _ in 0..rng.gen_range(0..=2) {
                if n > 0 {
                    m = &m * &Poly::var(n + 1, 1 + rng.gen_range(0..n));
                }
            }
            let c = Rational::new(rng.gen_range(-2..=2).into(), rng.gen_range(1..=2).into());
            p = &p + &m.scale(&c);
        }
        p
    };
    let l = Poly::var(n + 1, 0);
    let coefficients = (0..b.num_generators())
        .map(|_| {
            let p = random_poly(rng);
            let q = random_poly(rng);
            &(&l * &p) + &(&(&l * &l) * &q)
        })
        .collect();
    FamilySpec { coefficients, domain }
}

/// Limit of `(φ^Y_{−s} φ^X_{−s} φ^Y_s φ^X_s(x) − x)/s²` by Richardson
/// extrapolation over `s, s/2, s/4`, compared with `[X, Y](x)` for two sections of a foliation.
pub fn flow_commutator_deviation(
    b: &SingularSubalgebroid,
    xs: &FreeModuleElem,
    ys: &FreeModuleElem,
    points: &[Vec<f64>],
    s: f64,
    cfg: &FlowConfig,
) -> Result<f64, DiffError> {
    let fx = CompiledField::new(b.ambient().anchor(xs)?.components());
    let fy = CompiledField::new(b.ambient().anchor(ys)?.components());
    let br = b.ambient().anchor(&b.bracket(xs, ys)?)?;
    let quotient = |x: &[f64], s: f64| -> Result<Vec<f64>, FlowError> {
        let mut p = flow(&fx, x, s, cfg)?;
        p = flow(&fy, &p, s, cfg)?;
        p = flow(&fx, &p, -s, cfg)?;
        p = flow(&fy, &p, -s, cfg)?;
        Ok(p.iter().zip(x).map(|(a, b)| (a - b) / (s * s)).collect())
    };
    let mut worst = 0.0_f64;
    for x in points {
        let (d1, d2, d4) = (quotient(x, s)?, quotient(x, s / 2.0)?, quotient(x, s / 4.0)?);
        // D(s) = L + as + bs² + …: eliminate the linear, then the quadratic term
        let r1: Vec<f64> = d1.iter().zip(&d2).map(|(a, b)| 2.0 * b - a).collect();
        let r2: Vec<f64> = d2.iter().zip(&d4).map(|(a, b)| 2.0 * b - a).collect();
        let lim: Vec<f64> = r1.iter().zip(&r2).map(|(a, b)| (4.0 * b - a) / 3.0).collect();
        worst = worst.max(sup_dist(&lim, &br.evaluate_f64(x)));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::one_parameter_group;
    use crate::geometry::{dsl::parse_poly, parse};

    fn sq() -> SingularSubalgebroid {
        parse("vars: x\ngenerators:\n - x^2*dx").unwrap()
    }

    fn family(b: &SingularSubalgebroid, src: &str) -> FamilySpec {
        let mut vars = vec!["l".to_string()];
        vars.extend(b.vars().iter().cloned());
        FamilySpec { coefficients: vec![parse_poly(src, &vars).unwrap()], domain: Domain::cube(b.base_dim(), 1.0) }
    }

    #[test]
    fn square_field_families() {
        let b = sq();
        let x2 = FreeModuleElem::new(1, vec![parse_poly("x^2", b.vars()).unwrap()]);
        let r = differentiate_family(&b, &family(&b, "l"), &DiffConfig::default()).unwrap();
        assert!(r.member && r.section == x2);
        assert!(r.order.unwrap() > 1.5, "{:?}", r.refinement);
        let r = differentiate_family(&b, &family(&b, "l*(1 + x^2)"), &DiffConfig::default()).unwrap();
        assert_eq!(r.section, FreeModuleElem::new(1, vec![parse_poly("x^2 + x^4", b.vars()).unwrap()]));
        assert!(r.member);
        let r = differentiate_family(&b, &family(&b, "l^2"), &DiffConfig::default()).unwrap();
        assert!(r.section.is_zero() && r.member);
        assert!(matches!(
            differentiate_family(&b, &family(&b, "l + x"), &DiffConfig::default()),
            Err(DiffError::NonzeroAtZero(0))
        ));
    }

    #[test]
    fn generators_are_recovered() {
        let rot = parse("vars: x y\ngenerators:\n - -y*dx + x*dy").unwrap();
        let grid = interior_grid(&Domain::cube(2, 0.7), 5);
        let r = recover_generators(&rot, &Domain::cube(2, 1.0), &grid, 1e-4, 1e-6, FlowConfig::with_tol(1e-12)).unwrap();
        assert!(r.pass(), "{:?}", r.deviations);
        let grid = interior_grid(&Domain::cube(1, 1.0), 9);
        let r = recover_generators(&sq(), &Domain::cube(1, 1.0), &grid, 1e-4, 1e-6, FlowConfig::with_tol(1e-12)).unwrap();
        assert!(r.pass());
        let zero = SingularSubalgebroid::foliation(2, vec![]).unwrap();
        let r = recover_generators(&zero, &Domain::cube(2, 1.0), &grid, 1e-4, 1e-6, FlowConfig::default()).unwrap();
        assert!(r.deviations.is_empty() && r.pass());
    }

    #[test]
    fn injectivity_on_rotation_charts() {
        let rot = parse("vars: x y\ngenerators:\n - -y*dx + x*dy").unwrap();
        let ball = vec![vec![0.1, 0.0], vec![0.0, 0.1], vec![0.05, -0.05]];
        let cfg = FlowConfig::default();
        let r = almost_injectivity_probe(&rot, &[0], &ball, 1.0, 9, 1e-9, &cfg).unwrap();
        assert_eq!(r.verdict, InjectivityVerdict::Pass);
        assert_eq!(r.carrying_identity, 1);
        let dup = parse("vars: x y\ngenerators:\n - -y*dx + x*dy\n - -y*dx + x*dy").unwrap();
        let r = almost_injectivity_probe(&dup, &[0, 1], &ball, 1.0, 5, 1e-9, &cfg).unwrap();
        assert!(matches!(r.verdict, InjectivityVerdict::RedundantChart { .. }));
    }

    #[test]
    fn group_laws() {
        let rot = parse("vars: x y\ngenerators:\n - -y*dx + x*dy").unwrap();
        let fam = one_parameter_group(&rot, &rot.generators()[0], Domain::cube(2, 2.0), FlowConfig::default()).unwrap();
        let r = group_law_probe(&fam, 50, 1, 1e-6).unwrap();
        assert!(r.pass(), "{r:?}");
        let lin = parse("vars: x\ngenerators:\n - x*dx").unwrap();
        let fam = one_parameter_group(&lin, &lin.generators()[0], Domain::cube(1, 1.0), FlowConfig::default()).unwrap();
        let r = group_law_probe(&fam, 50, 2, 1e-6).unwrap();
        assert!(r.pass() && r.skipped > 0, "{r:?}");
        assert_eq!(fam.product(0.0, 0.0, &[0.3], 1e-9).unwrap().distance_to_unit(), 0.0);
    }

    #[test]
    fn random_families_close_under_operations() {
        let b = parse("vars: x y\ngenerators:\n - x*dx\n - y*dx\n - x*dy\n - y*dy").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let results: Vec<_> = (0..4)
            .map(|_| differentiate_family(&b, &random_family(&b, Domain::cube(2, 0.5), &mut rng), &DiffConfig::default()).unwrap())
            .collect();
        for r in &results {
            assert!(r.member);
        }
        let br = b.bracket(&results[0].section, &results[1].section).unwrap();
        assert!(b.contains(&br).unwrap());
        let pts = vec![vec![0.3, -0.2], vec![0.5, 0.1], vec![-0.4, 0.4]];
        let d = flow_commutator_deviation(&b, &results[0].section, &results[1].section, &pts, 1e-2, &FlowConfig::with_tol(1e-12)).unwrap();
        assert!(d < 1e-3, "{d}");
    }
}
