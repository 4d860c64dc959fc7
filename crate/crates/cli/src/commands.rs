use std::path::Path;

use folia_core::diffdiff::{differentiate_family, group_law_probe, interior_grid, recover_generators, DiffConfig, FamilySpec};
use folia_core::flows::{one_parameter_group, path_holonomy_exp, Domain, FlowConfig};
use folia_core::geometry::dsl::{parse_poly, parse_section_for, section_expr};
use folia_core::geometry::{AmbientAlgebroid, Involutivity};
use folia_core::graph::{graph_equal_sample, openness_counterexample, same_leaf, subspace_diffeology_differentiation, Arc, LeafVerdict, SearchConfig};
use folia_core::holonomy::{integrate_lie_subalgebra, HolonomyError, SubgroupConfig};
use folia_core::pointwise::{fiber_reports, format_point, projectivity_scan, ProjectivityVerdict};
use folia_core::poly::{format_rational, rational_to_f64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::input::{self, load};
use crate::{CliError, Report};

pub fn check(file: &Path) -> Result<Report, CliError> {
    let b = load(file)?;
    let gens: Vec<String> = (0..b.num_generators()).map(|i| b.display_generator(i)).collect();
    match b.check_involutive()? {
        Involutivity::Refuted(w) => {
            let show = |e: &folia_core::FreeModuleElem| section_expr(b.ambient(), b.vars(), e);
            Ok(Report {
                schema: "folia.check/1",
                json: json!({
                    "involutive": false,
                    "generators": gens,
                    "witness": {"i": w.i, "j": w.j, "bracket": show(&w.bracket), "remainder": show(&w.remainder)},
                }),
                summary: format!(
                    "not involutive: [g{}, g{}] = {} leaves the module (remainder {})",
                    w.i,
                    w.j,
                    show(&w.bracket),
                    show(&w.remainder)
                ),
                refuted: true,
            })
        }
        _ => Ok(Report {
            schema: "folia.check/1",
            json: json!({"involutive": true, "generators": gens}),
            summary: format!("involutive: {} generators, rank {}, base dimension {}", b.num_generators(), b.rank(), b.base_dim()),
            refuted: false,
        }),
    }
}

pub fn dims(file: &Path, point: &[String], grid: Option<&str>) -> Result<Report, CliError> {
    let b = load(file)?;
    let pts = input::points(point, grid, b.base_dim())?;
    let reports = fiber_reports(&b, &pts)?;
    let summary = reports
        .iter()
        .map(|r| {
            format!(
                "({}): dim_ev {}, dim_isotropy {}, dim_fiber {}",
                format_point(&r.point),
                r.dim_ev,
                r.dim_isotropy,
                r.dim_fiber
            )
        })
        .collect::<Vec<_>>()
        .join("\n");
    let json = match reports.as_slice() {
        [one] => one.to_json(),
        many => json!({"reports": many.iter().map(|r| r.to_json()).collect::<Vec<_>>()}),
    };
    Ok(Report { schema: "folia.dims/1", json, summary, refuted: false })
}

pub fn proj(file: &Path, point: &[String], grid: &str) -> Result<Report, CliError> {
    let b = load(file)?;
    let pts = input::points(point, Some(grid), b.base_dim())?;
    let rep = projectivity_scan(&b, &pts)?;
    let summary = match &rep.verdict {
        ProjectivityVerdict::Projective { rank } => format!("projective on {} samples, rank {rank}", pts.len()),
        ProjectivityVerdict::NonProjective { first, second } => format!(
            "not projective: dim {} at ({}) but {} at ({})",
            rep.dims[*first],
            format_point(&pts[*first]),
            rep.dims[*second],
            format_point(&pts[*second])
        ),
        ProjectivityVerdict::Inconclusive => "inconclusive: fewer than two samples".into(),
    };
    Ok(Report { schema: "folia.proj/1", json: rep.to_json(), summary, refuted: false })
}

pub fn leaf(file: &Path, from: &str, to: &str, budget: usize) -> Result<Report, CliError> {
    let b = load(file)?;
    let (p, q) = (input::float_point(from, b.base_dim())?, input::float_point(to, b.base_dim())?);
    let cfg = SearchConfig { budget, ..SearchConfig::default() };
    let v = same_leaf(&b, &p, &q, &cfg)?;
    let summary = match &v {
        LeafVerdict::Yes(path) => format!("same leaf: {} segments, endpoint error {:.1e}", path.segments.len(), path.max_deviation),
        LeafVerdict::Unknown { expanded, escapes } => format!("unknown after {expanded} expansions ({escapes} flows escaped)"),
    };
    Ok(Report { schema: "folia.leaf/1", json: json!({"from": p, "to": q, "result": v.to_json()}), summary, refuted: false })
}

pub fn graph_eq(first: &Path, second: &Path, values: &str, budget: usize) -> Result<Report, CliError> {
    let (b1, b2) = (load(first)?, load(second)?);
    let axis: Vec<f64> = input::values(values)?.iter().map(rational_to_f64).collect();
    let grid = input::product(&axis, b1.base_dim());
    let cfg = SearchConfig { budget, ..SearchConfig::default() };
    let cmp = graph_equal_sample(&b1, &b2, &grid, &cfg)?;
    let dis = cmp.disagreements();
    let summary = format!(
        "{} pairs: {} joined by both, {} unknown to both, {} disagreements",
        grid.len() * grid.len(),
        cmp.agreements(),
        cmp.unknowns(),
        dis.len()
    );
    Ok(Report { schema: "folia.graph-eq/1", json: cmp.to_json(), summary, refuted: !dis.is_empty() })
}

pub fn exp(file: &Path, lambda: &str, point: &str, tol: f64) -> Result<Report, CliError> {
    let b = load(file)?;
    let l = input::float_point(lambda, b.num_generators())?;
    let x = input::float_point(point, b.base_dim())?;
    let e = path_holonomy_exp(&b, &l, &x, &FlowConfig::with_tol(tol))?;
    let summary = format!("target {:?}", e.target());
    Ok(Report { schema: "folia.exp/1", json: json!({"lambda": l, "point": x, "element": e.to_json()}), summary, refuted: false })
}

pub fn family(file: &Path, generator: usize, section: Option<&str>, r: f64, triples: usize, tol: f64, seed: u64) -> Result<Report, CliError> {
    let b = load(file)?;
    let alpha = match section {
        Some(s) => parse_section_for(&b, s)?,
        None => b
            .generators()
            .get(generator)
            .cloned()
            .ok_or_else(|| CliError(format!("generator {generator} out of range ({} generators)", b.num_generators())))?,
    };
    let dom = Domain::cube(b.base_dim(), r);
    let fam = one_parameter_group(&b, &alpha, dom.clone(), FlowConfig::default())?;
    let law = group_law_probe(&fam, triples, seed, tol)?;
    let grid = interior_grid(&Domain::cube(b.base_dim(), 0.9 * r), 5);
    let single = b.with_generators(vec![alpha.clone()])?;
    let rec = recover_generators(&single, &dom, &grid, 1e-4, 1e-5, FlowConfig::with_tol(1e-12))?;
    let summary = format!(
        "group law on {} triples (skipped {}): max deviation {:.1e}; derivative recovery {:.1e}",
        law.tested,
        law.skipped,
        law.max_deviation,
        rec.max_deviation()
    );
    let section_text = section_expr(b.ambient(), b.vars(), &alpha);
    Ok(Report {
        schema: "folia.family/1",
        json: json!({"section": section_text, "box": r, "group_law": law.to_json(), "derivative": rec.to_json()}),
        summary,
        refuted: !law.pass() || !rec.pass(),
    })
}

pub fn integrate(algebra: &str, basis: &[String], lambda_max: f64, step: f64, seed: u64) -> Result<Report, CliError> {
    let g = AmbientAlgebroid::named_lie_algebra(algebra)?;
    let vecs = basis.iter().map(|s| input::point(s, g.rank())).collect::<Result<Vec<_>, _>>()?;
    let cfg = SubgroupConfig { lambda_max, step, seed, ..SubgroupConfig::default() };
    match integrate_lie_subalgebra(&g, &vecs, &cfg) {
        Ok(rep) => {
            let kernel = rep.kernel.iter().map(|k| format!("direction {} at {:.12}", k.direction, k.lambda)).collect::<Vec<_>>();
            let summary = format!(
                "dimension {}; kernel: {}; injectivity radius {:.6}; {}",
                vecs.len(),
                if kernel.is_empty() { "none found".into() } else { kernel.join(", ") },
                rep.injectivity_radius,
                rep.closure.describe()
            );
            let basis_text: Vec<Vec<String>> = vecs.iter().map(|v| v.iter().map(format_rational).collect()).collect();
            let mut json = rep.to_json();
            json["algebra"] = json!(algebra);
            json["basis"] = json!(basis_text);
            Ok(Report { schema: "folia.integrate/1", json, summary, refuted: false })
        }
        Err(HolonomyError::NotSubalgebra { i, j, bracket }) => Ok(Report {
            schema: "folia.integrate/1",
            json: json!({"algebra": algebra, "subalgebra": false, "witness": {"i": i, "j": j, "bracket": bracket}}),
            summary: format!("not a subalgebra: bracket of basis vectors {i} and {j} is {bracket:?}"),
            refuted: true,
        }),
        Err(e) => Err(e.into()),
    }
}

fn family_vars(b: &folia_core::SingularSubalgebroid) -> Vec<String> {
    let mut vars = vec!["l".to_string()];
    vars.extend(b.vars().iter().cloned());
    vars
}

pub fn differentiate(file: &Path, family: &[String], r: f64, tol: f64) -> Result<Report, CliError> {
    let b = load(file)?;
    let vars = family_vars(&b);
    let coefficients = family.iter().map(|s| parse_poly(s, &vars)).collect::<Result<Vec<_>, _>>()?;
    let spec = FamilySpec { coefficients, domain: Domain::cube(b.base_dim(), r) };
    let cfg = DiffConfig { tol, ..DiffConfig::default() };
    let res = differentiate_family(&b, &spec, &cfg)?;
    let summary = format!(
        "derivative {} ({}); finite differences within {:.1e}{}",
        section_expr(b.ambient(), b.vars(), &res.section),
        if res.member { "member" } else { "not a member" },
        res.max_deviation,
        res.order.map(|o| format!(", order {o:.2}")).unwrap_or_default()
    );
    let mut json = res.to_json(b.vars());
    json["section"] = json!(section_expr(b.ambient(), b.vars(), &res.section));
    Ok(Report { schema: "folia.differentiate/1", json, summary, refuted: !res.member })
}

pub fn openness(arc: &str, samples: usize, seed: u64) -> Result<Report, CliError> {
    let ends: Vec<f64> = input::values(arc)?.iter().map(rational_to_f64).collect();
    let [lo, hi] = ends[..] else {
        return Err(CliError(format!("arc `{arc}` must be lo,hi")));
    };
    let so2 = AmbientAlgebroid::named_action("so2")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = vec![vec![0.0, 0.0]];
    pts.extend((0..samples).map(|_| vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]));
    let angles: Vec<f64> = (0..36).map(|i| i as f64 * std::f64::consts::PI / 18.0 + 0.013).collect();
    let pi = std::f64::consts::PI;
    let rep = openness_counterexample(&so2, &Arc { lo, hi }, &pts, &angles, &[pi / 2.0, pi, 1.5 * pi], &[1e-1, 1e-2, 1e-3])?;
    let summary = if rep.pass() {
        format!("saturation identity on {} samples; (g, 0) lies in the saturation with (g, (eps, 0)) outside for eps down to 1e-3", rep.samples_checked)
    } else if rep.saturation_identity() && rep.witnesses.is_empty() {
        "saturation is everything: the arc is the whole circle, no witness".into()
    } else {
        format!("{} saturation mismatches", rep.mismatches.len())
    };
    let mut json = rep.to_json();
    json["arc"] = json!([lo, hi]);
    Ok(Report { schema: "folia.counterexample.openness/1", json, summary, refuted: false })
}

pub fn subspace(file: &Path, family: &[String], point: &[String]) -> Result<Report, CliError> {
    let b = load(file)?;
    let vars = family_vars(&b);
    let comps = family.iter().map(|s| parse_poly(s, &vars)).collect::<Result<Vec<_>, _>>()?;
    let samples: Vec<Vec<f64>> = if point.is_empty() {
        interior_grid(&Domain::cube(b.base_dim(), 1.0), 3)
    } else {
        point.iter().map(|s| input::float_point(s, b.base_dim())).collect::<Result<_, _>>()?
    };
    let cfg = SearchConfig { budget: 5_000, ..SearchConfig::default() };
    let res = subspace_diffeology_differentiation(&b, &[comps], &samples, &[0.1, -0.1], &cfg)?;
    let d = &res[0];
    let text = section_expr(b.ambient(), b.vars(), &d.section);
    let summary = format!(
        "derivative {text}: {}; sampled leaves {}",
        if d.member { "member" } else { "not a member" },
        if d.preserves_leaves { "preserved" } else { "not preserved" }
    );
    let mut json = d.to_json(b.vars());
    json["derivative"] = json!(text);
    json["samples"] = json!(samples);
    Ok(Report { schema: "folia.counterexample.subspace/1", json, summary, refuted: false })
}
