mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use common::*;
use folia_core::diffdiff::{
    differentiate_family, flow_commutator_deviation, group_law_probe, interior_grid, random_family, recover_generators, DiffConfig,
};
use folia_core::flows::{one_parameter_group, Domain, ExpMap, FlowConfig, GroupoidElement};
use folia_core::geometry::{commutator, dsl::parse_poly, is_tangent, AmbientAlgebroid, RatMatrix};
use folia_core::graph::{
    anchored_fields, graph_equal_sample, openness_counterexample, same_leaf, subspace_diffeology_differentiation, Arc,
    SearchConfig,
};
use folia_core::holonomy::{integrate_lie_subalgebra, integrate_lie_subalgebra_f64, Chart, Closure, SubgroupConfig};
use folia_core::linalg::solve_in_span;
use folia_core::pointwise::{fiber_report, projectivity_scan, ProjectivityVerdict};
use folia_core::poly::{syzygies, FreeModuleElem, GroebnerConfig, Poly, Rational, SubmoduleData};
use num::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let out = f();
    let el = start.elapsed();
    match (out, limit) {
        (Ok(msg), Some(l)) if el > l => Err(format!("{msg}; took {:.2}s, limit {:.0}s", el.as_secs_f64(), l.as_secs_f64())),
        (Ok(msg), _) => Ok(format!("{msg} ({:.2}s)", el.as_secs_f64())),
        (Err(e), _) => Err(e),
    }
}

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn random_poly(nvars: usize, deg: u32, rng: &mut impl Rng) -> Poly {
    let terms: Vec<(Vec<u32>, i64, i64)> = (0..rng.gen_range(0..=4))
        .map(|_| {
            let mut e = vec![0u32; nvars];
            for _ in 0..if nvars == 0 { 0 } else { rng.gen_range(0..=deg) } {
                e[rng.gen_range(0..nvars)] += 1;
            }
            (e, rng.gen_range(-5..=5), rng.gen_range(1..=3))
        })
        .collect();
    poly_from(nvars, &terms)
}

fn random_elem(nvars: usize, rank: usize, deg: u32, rng: &mut impl Rng) -> FreeModuleElem {
    FreeModuleElem::new(nvars, (0..rank).map(|_| random_poly(nvars, deg, rng)).collect())
}

fn exact_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cfg = GroebnerConfig::default();
    let mut members = 0;
    for _ in 0..1000 {
        let (nvars, rank) = (rng.gen_range(1..=3), rng.gen_range(1..=2));
        let gens: Vec<FreeModuleElem> = (0..rng.gen_range(1..=3)).map(|_| random_elem(nvars, rank, 2, &mut rng)).collect();
        let m = SubmoduleData::new(nvars, rank, gens.clone(), &cfg).map_err(|e| e.to_string())?;
        let e = random_elem(nvars, rank, 3, &mut rng);
        let (rem, cert) = m.normal_form(&e).map_err(|e| e.to_string())?;
        check(&m.combine(&cert) + &rem == e, "division round trip failed")?;
        let coeffs: Vec<Poly> = gens.iter().map(|_| random_poly(nvars, 2, &mut rng)).collect();
        let member = m.combine(&coeffs);
        let (rem, cert) = m.normal_form(&member).map_err(|e| e.to_string())?;
        check(rem.is_zero() && m.combine(&cert) == member, "member not recognised")?;
        members += 1;
        if let Some(first) = gens.first() {
            for s in syzygies(&gens, &cfg).map_err(|e| e.to_string())? {
                check(FreeModuleElem::combination(first.nvars(), rank, &s, &gens).is_zero(), "syzygy residual non-zero")?;
            }
        }
    }
    for name in SHIPPED {
        let b = load(name);
        for s in b.module().syzygies() {
            check(b.module().combine(s).is_zero(), format!("{name}: syzygy residual non-zero"))?;
        }
    }
    Ok(format!("{members} round trips exact, syzygy residuals zero"))
}

fn fiber_dimensions() -> Outcome {
    let dims = |name: &str, x: &[Rational]| fiber_report(&load(name), x).map(|r| (r.dim_ev, r.dim_isotropy, r.dim_fiber));
    let sq0 = dims("square", &[r(0, 1)]).map_err(|e| e.to_string())?;
    let sq1 = dims("square", &[r(1, 1)]).map_err(|e| e.to_string())?;
    check(sq0 == (0, 1, 1) && sq1 == (1, 0, 1), format!("square: {sq0:?} {sq1:?}"))?;
    let v0 = dims("vanish_origin", &[r(0, 1), r(0, 1)]).map_err(|e| e.to_string())?.2;
    let v1 = dims("vanish_origin", &[r(1, 1), r(0, 1)]).map_err(|e| e.to_string())?.2;
    check(v0 == 4 && v1 == 2, format!("vanishing module: {v0} {v1}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut pts2: Vec<Vec<Rational>> = vec![vec![r(0, 1), r(0, 1)], vec![r(3, 1), r(0, 1)]];
    pts2.extend((0..10).map(|_| random_point(2, &mut rng)));
    let hyp = projectivity_scan(&load("hypersurface"), &pts2).map_err(|e| e.to_string())?;
    check(hyp.verdict == ProjectivityVerdict::Projective { rank: 2 }, format!("hypersurface: {:?}", hyp.verdict))?;
    let mut pts3: Vec<Vec<Rational>> = vec![vec![r(0, 1); 3], vec![r(1, 1), r(0, 1), r(0, 1)]];
    pts3.extend((0..10).map(|_| random_point(3, &mut rng)));
    let codim2 = projectivity_scan(&load("codim2"), &pts3).map_err(|e| e.to_string())?;
    check(matches!(codim2.verdict, ProjectivityVerdict::NonProjective { .. }), format!("codim 2: {:?}", codim2.verdict))?;
    Ok(format!("square (0,1,1)/(1,0,1), vanishing 4/2, hypersurface projective rank 2, codim 2 dims {:?}", codim2.dims))
}

fn ses_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    for name in SHIPPED {
        let b = load(name);
        if !b.is_involutive() {
            continue;
        }
        let pts: Vec<Vec<Rational>> = (0..100).map(|_| random_point(b.base_dim(), &mut rng)).collect();
        for rep in folia_core::pointwise::fiber_reports(&b, &pts).map_err(|e| e.to_string())? {
            check(rep.ses_holds(), format!("{name}: SES fails at {:?}", rep.point))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} points over the involutive shipped modules"))
}

fn elementary(i: usize, j: usize) -> RatMatrix {
    let mut m = vec![vec![r(0, 1); 2]; 2];
    m[i][j] = r(1, 1);
    m
}

fn isotropy_gl2() -> Outcome {
    let b = load("vanish_origin");
    let rep = fiber_report(&b, &[r(0, 1), r(0, 1)]).map_err(|e| e.to_string())?;
    check(rep.dim_isotropy == 4, format!("isotropy dimension {}", rep.dim_isotropy))?;
    // generator order x∂x, y∂x, x∂y, y∂y is the linear field of E11, E12, E21, E22;
    // A ↦ −X_A is the Lie algebra isomorphism gl(2) → 𝔟₀.
    let units = [elementary(0, 0), elementary(0, 1), elementary(1, 0), elementary(1, 1)];
    let to_matrix = |v: &[Rational]| -> RatMatrix {
        let mut m = vec![vec![r(0, 1); 2]; 2];
        for (c, e) in v.iter().zip(&units) {
            for i in 0..2 {
                for j in 0..2 {
                    m[i][j] -= c * &e[i][j];
                }
            }
        }
        m
    };
    let flat = |m: &RatMatrix| -> Vec<Rational> { m.iter().flatten().cloned().collect() };
    let mats: Vec<RatMatrix> = rep.isotropy_basis.iter().map(|v| to_matrix(v)).collect();
    let basis: Vec<Vec<Rational>> = mats.iter().map(flat).collect();
    for i in 0..4 {
        for j in 0..4 {
            let oracle = solve_in_span(&basis, &flat(&commutator(&mats[i], &mats[j]))).ok_or("commutator outside span")?;
            check(oracle == rep.structure_constants[i][j], format!("constants differ at ({i},{j})"))?;
        }
    }
    let nonzero = rep.sparse_constants().len();
    Ok(format!("dimension 4, {nonzero} non-zero constants equal to the gl(2) commutator table"))
}

fn flow_accuracy() -> Outcome {
    let cfg = FlowConfig::default();
    let mut worst = 0.0_f64;
    let lin = ExpMap::for_generators(&load("linear")).map_err(|e| e.to_string())?;
    let sq = ExpMap::for_generators(&load("square")).map_err(|e| e.to_string())?;
    let rot = ExpMap::for_generators(&load("rotation")).map_err(|e| e.to_string())?;
    for i in 0..21 {
        let l = -2.0 + 0.2 * i as f64;
        for &x in &[-1.5, -0.3, 0.0, 0.7, 2.0] {
            let t = lin.target(&[l], &[x], &cfg).map_err(|e| e.to_string())?[0];
            worst = worst.max((t - x * l.exp()).abs() / (1.0 + x.abs() * l.exp()));
            if l * x < 0.5 {
                let t = sq.target(&[l], &[x], &cfg).map_err(|e| e.to_string())?[0];
                worst = worst.max((t - x / (1.0 - l * x)).abs());
            }
        }
        let p = [0.6, -0.8];
        let t = rot.target(&[3.0 * l], &p, &cfg).map_err(|e| e.to_string())?;
        let (c, s) = ((3.0 * l).cos(), (3.0 * l).sin());
        worst = worst.max(sup_dist(&t, &[c * p[0] - s * p[1], s * p[0] + c * p[1]]));
    }
    check(worst <= 1e-6, format!("closed-form deviation {worst:e}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut kappa = 0.0_f64;
    let mut tested = 0;
    for name in ["rotation", "square", "vanish_origin", "so3_action"] {
        let b = load(name);
        let k = b.num_generators();
        let chart = Chart::path_holonomy(&b, &(0..k).collect::<Vec<_>>(), Domain::cube(k, 0.5), Domain::cube(b.base_dim(), f64::INFINITY), cfg.clone(), 0)
            .map_err(|e| e.to_string())?;
        for _ in 0..25 {
            let p: Vec<f64> = (0..k).map(|_| rng.gen_range(-0.5..0.5)).collect();
            let x: Vec<f64> = (0..b.base_dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let (kp, kx) = chart.kappa(&p, &x).map_err(|e| e.to_string())?;
            let lhs = chart.evaluate(&kp, &kx).map_err(|e| e.to_string())?;
            let rhs = chart.evaluate(&p, &x).map_err(|e| e.to_string())?.inverse();
            kappa = kappa.max(lhs.distance(&rhs));
            tested += 1;
        }
    }
    check(kappa <= 1e-6, format!("kappa identity deviation {kappa:e}"))?;
    Ok(format!("closed forms within {worst:.1e}, kappa identity within {kappa:.1e} on {tested} samples"))
}

fn group_law() -> Outcome {
    let cfg = FlowConfig::default();
    let mut msgs = Vec::new();
    for (name, dom) in [("rotation", Domain::cube(2, 2.0)), ("linear", Domain::cube(1, 1.0))] {
        let b = load(name);
        let fam = one_parameter_group(&b, &b.generators()[0], dom.clone(), cfg.clone()).map_err(|e| e.to_string())?;
        let mut report = group_law_probe(&fam, 200, 6, 1e-6).map_err(|e| e.to_string())?;
        let mut seed = 100;
        while report.tested < 200 {
            let more = group_law_probe(&fam, 200 - report.tested, seed, 1e-6).map_err(|e| e.to_string())?;
            report.tested += more.tested;
            report.max_deviation = report.max_deviation.max(more.max_deviation);
            seed += 1;
        }
        check(report.pass(), format!("{name}: group law deviation {:e}", report.max_deviation))?;
        let grid = interior_grid(&Domain::cube(dom.dim(), 0.9), 7);
        let rec = recover_generators(&b, &dom, &grid, 1e-4, 1e-5, FlowConfig::with_tol(1e-12)).map_err(|e| e.to_string())?;
        check(rec.pass(), format!("{name}: derivative deviation {:e}", rec.max_deviation()))?;
        msgs.push(format!("{name} law {:.1e} / derivative {:.1e}", report.max_deviation, rec.max_deviation()));
    }
    Ok(msgs.join(", "))
}

fn differentiation_closure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cfg = DiffConfig::default();
    let mut orders = Vec::new();
    let mut results = 0;
    let mut comm = 0.0_f64;
    for name in SHIPPED {
        let b = load(name);
        if !b.is_involutive() || b.num_generators() == 0 {
            continue;
        }
        let dom = Domain::cube(b.base_dim(), 0.5);
        let mut res = Vec::new();
        for _ in 0..50 {
            let spec = random_family(&b, dom.clone(), &mut rng);
            let d = differentiate_family(&b, &spec, &cfg).map_err(|e| format!("{name}: {e}"))?;
            check(d.member, format!("{name}: derivative not a member"))?;
            orders.extend(d.order);
            res.push(d.section);
        }
        for pair in res.chunks(2) {
            let br = b.bracket(&pair[0], &pair[1]).map_err(|e| e.to_string())?;
            check(b.contains(&br).map_err(|e| e.to_string())?, format!("{name}: bracket not a member"))?;
        }
        let f = random_poly(b.base_dim(), 2, &mut rng);
        let combo = &res[0].scale_poly(&f) + &res[1];
        check(b.contains(&combo).map_err(|e| e.to_string())?, format!("{name}: f r1 + r2 not a member"))?;
        if is_tangent(&b) && b.base_dim() > 0 {
            let pts: Vec<Vec<f64>> = (0..3).map(|_| (0..b.base_dim()).map(|_| rng.gen_range(-0.5..0.5)).collect()).collect();
            let dev = flow_commutator_deviation(&b, &res[0], &res[1], &pts, 1e-2, &FlowConfig::with_tol(1e-12)).map_err(|e| e.to_string())?;
            check(dev <= 1e-3, format!("{name}: commutator of flows deviates by {dev:e}"))?;
            comm = comm.max(dev);
        }
        results += res.len();
    }
    let min_order = orders.iter().copied().fold(f64::INFINITY, f64::min);
    check(!orders.is_empty() && min_order >= 1.5, format!("finite-difference order {min_order:.2}"))?;
    Ok(format!("{results} families differentiate to members, brackets closed, flow commutators within {comm:.1e}, minimal observed order {min_order:.2}"))
}

fn graph_equality() -> Outcome {
    let vals = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0];
    let grid: Vec<Vec<f64>> = vals.iter().map(|&v| vec![v]).collect();
    let (lin, sq) = (load("linear"), load("square"));
    let cmp = graph_equal_sample(&lin, &sq, &grid, &SearchConfig::default()).map_err(|e| e.to_string())?;
    let dis = cmp.disagreements();
    check(dis.is_empty(), format!("{} disagreements, first {:?}", dis.len(), dis.first()))?;
    let (fl, fs) = (anchored_fields(&lin).map_err(|e| e.to_string())?, anchored_fields(&sq).map_err(|e| e.to_string())?);
    let replay_cfg = FlowConfig::with_tol(1e-11);
    let mut worst = 0.0_f64;
    let mut replayed = 0;
    for (first, path) in cmp.paths() {
        let end = path.replay(if first { &fl } else { &fs }, &replay_cfg).map_err(|e| e.to_string())?;
        worst = worst.max(sup_dist(&end, &path.end));
        replayed += 1;
    }
    check(worst <= 1e-5, format!("replay deviation {worst:e}"))?;
    Ok(format!("0 disagreements over 49 pairs ({} joined by both), {replayed} paths replay within {worst:.1e}", cmp.agreements()))
}

fn subspace_counterexample() -> Outcome {
    let b = load("square");
    let vars = vec!["l".to_string(), "x".to_string()];
    let fam = vec![vec![parse_poly("(1 + l)*x", &vars).map_err(|e| e.to_string())?]];
    let cfg = SearchConfig { budget: 5_000, ..SearchConfig::default() };
    let res = subspace_diffeology_differentiation(&b, &fam, &[vec![0.5], vec![-1.0], vec![0.0]], &[0.1, -0.1], &cfg)
        .map_err(|e| e.to_string())?;
    let d = &res[0];
    check(d.section == FreeModuleElem::new(1, vec![Poly::var(1, 0)]), "derivative is not x∂x")?;
    check(!d.member, "x∂x reported as a member")?;
    check(d.preserves_leaves, "family does not preserve the sampled leaves")?;
    Ok("derivative x∂x, not a member of the module, family preserves sampled leaves".into())
}

fn openness() -> Outcome {
    let so2 = AmbientAlgebroid::named_action("so2").map_err(|e| e.to_string())?;
    let arc = Arc { lo: -PI / 4.0, hi: PI / 4.0 };
    let mut samples = vec![vec![0.0, 0.0]];
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    samples.extend((0..20).map(|_| vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]));
    let angles: Vec<f64> = (0..36).map(|i| i as f64 * PI / 18.0 + 0.013).collect();
    let rep = openness_counterexample(&so2, &arc, &samples, &angles, &[PI / 2.0, PI, 1.5 * PI], &[1e-1, 1e-2, 1e-3])
        .map_err(|e| e.to_string())?;
    check(rep.saturation_identity(), format!("{} saturation mismatches", rep.mismatches.len()))?;
    check(rep.pass(), "witness failed")?;
    Ok(format!("saturation identity on {} samples, witnesses at pi/2, pi, 3pi/2 down to 1e-3", rep.samples_checked))
}

fn subgroups() -> Outcome {
    let so3 = AmbientAlgebroid::named_lie_algebra("so3").map_err(|e| e.to_string())?;
    let rep = integrate_lie_subalgebra(&so3, &[vec![r(0, 1), r(0, 1), r(1, 1)]], &SubgroupConfig::default()).map_err(|e| e.to_string())?;
    let k = rep.kernel.first().ok_or("no kernel detected for so(2)")?;
    check((k.lambda - 2.0 * PI).abs() <= 1e-9, format!("kernel at {}", k.lambda))?;
    check(rep.injectivity_radius >= PI - 1e-2, format!("injectivity radius {}", rep.injectivity_radius))?;
    let t2 = AmbientAlgebroid::named_lie_algebra("t2").map_err(|e| e.to_string())?;
    let cfg = SubgroupConfig { lambda_max: 1e3, ..SubgroupConfig::default() };
    let torus = integrate_lie_subalgebra_f64(&t2, &[vec![1.0, 2f64.sqrt()]], &cfg).map_err(|e| e.to_string())?;
    check(torus.kernel.is_empty(), format!("spurious kernel {:?}", torus.kernel))?;
    Ok(format!(
        "so(2) kernel at 2pi (error {:.1e}), radius {:.4}; irrational line: no kernel up to 1e3, {}",
        (k.lambda - 2.0 * PI).abs(),
        rep.injectivity_radius,
        match torus.closure {
            Closure::Compact => "compact",
            Closure::NotClosed => "not closed",
            Closure::NoRecurrence => "no recurrence",
        }
    ))
}

fn reproducible_json() -> Result<String, String> {
    let b = load("vanish_origin");
    let rep = fiber_report(&b, &[r(0, 1), r(0, 1)]).map_err(|e| e.to_string())?;
    let so3 = AmbientAlgebroid::named_lie_algebra("so3").map_err(|e| e.to_string())?;
    let sub = integrate_lie_subalgebra(&so3, &[vec![r(0, 1), r(0, 1), r(1, 1)]], &SubgroupConfig::default()).map_err(|e| e.to_string())?;
    let rot = load("rotation");
    let leaf = same_leaf(&rot, &[1.0, 0.0], &[0.0, -1.0], &SearchConfig::default()).map_err(|e| e.to_string())?;
    let chart = Chart::path_holonomy(&rot, &[0], Domain::cube(1, 1.0), Domain::cube(2, 1.0), FlowConfig::default(), 42).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let spec = random_family(&b, Domain::cube(2, 0.5), &mut rng);
    let diff = differentiate_family(&b, &spec, &DiffConfig::default()).map_err(|e| e.to_string())?;
    let products = sub.sample_products(5, 3, 1.0, 9);
    let doc = serde_json::json!({
        "fiber": rep.to_json(),
        "subgroup": sub.to_json(),
        "products": products.iter().map(|m| m.iter().copied().collect::<Vec<f64>>()).collect::<Vec<_>>(),
        "leaf": leaf.to_json(),
        "chart": chart.to_json(),
        "differentiation": diff.to_json(b.vars()),
        "exp": GroupoidElement::to_json(&ExpMap::for_generators(&rot).map_err(|e| e.to_string())?.exp(&[0.3], &[1.0, 2.0], &FlowConfig::default()).map_err(|e| e.to_string())?),
    });
    serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())
}

fn reproducibility() -> Outcome {
    let a = reproducible_json()?;
    let b = reproducible_json()?;
    let c = std::thread::spawn(reproducible_json).join().map_err(|_| "panic".to_string())??;
    check(a == b && b == c, "JSON differs between runs")?;
    Ok(format!("{} bytes identical over 3 runs", a.len()))
}

fn main() {
    let _ = Rational::zero();
    let secs = |s| Some(Duration::from_secs(s));
    let criteria: Vec<(&str, Option<Duration>, fn() -> Outcome)> = vec![
        ("exact algebra", secs(30), exact_algebra),
        ("fiber dimensions", secs(5), fiber_dimensions),
        ("short exact sequence", secs(10), ses_identity),
        ("isotropy gl(2)", None, isotropy_gl2),
        ("flow accuracy", None, flow_accuracy),
        ("group law and derivative recovery", None, group_law),
        ("differentiation closure", None, differentiation_closure),
        ("graph equality", None, graph_equality),
        ("subspace diffeology", None, subspace_counterexample),
        ("openness", secs(5), openness),
        ("Lie subalgebra integration", None, subgroups),
        ("reproducibility", None, reproducibility),
    ];
    let mut failures = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        match timed(limit, f) {
            Ok(msg) => println!("criterion {:>2} PASS  {name}: {msg}", i + 1),
            Err(msg) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {msg}", i + 1);
            }
        }
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
    println!("all 12 criteria pass");
}
