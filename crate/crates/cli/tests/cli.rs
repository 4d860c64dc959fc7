use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn module(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../modules").join(name)
}

fn folia(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_folia")).args(args).output().expect("binary runs")
}

/// Runs with `--json` into a temp dir and returns exit code and parsed report.
fn folia_json(args: &[&str]) -> (i32, Value) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let mut all: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap();
    all.extend(["--json", p]);
    let out = folia(&all);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("no report; stderr: {}", String::from_utf8_lossy(&out.stderr)));
    (out.status.code().unwrap(), serde_json::from_str(&text).unwrap())
}

fn path(name: &str) -> String {
    module(name).to_str().unwrap().to_string()
}

#[test]
fn check_reports_involutive_module() {
    let (code, v) = folia_json(&["check", &path("rotation.sfo")]);
    assert_eq!(code, 0);
    assert_eq!(v["involutive"], true);
    assert_eq!(v["schema"], "folia.check/1");
}

#[test]
fn check_refutes_non_involutive_module_with_witness() {
    let (code, v) = folia_json(&["check", &path("noninv.sfo")]);
    assert_eq!(code, 2);
    assert_eq!(v["involutive"], false);
    assert!(v.get("witness").is_some(), "{v}");
}

#[test]
fn dims_at_the_vanishing_point() {
    let (code, v) = folia_json(&["dims", &path("vanish_origin.sfo"), "--point", "0,0"]);
    assert_eq!(code, 0);
    assert_eq!(v["dim_fiber"], 4);
    assert_eq!(v["dim_ev"], 0);
    assert_eq!(v["dim_isotropy"], 4);
}

#[test]
fn parse_error_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.sfo");
    std::fs::write(&f, "vars: x y\ngenerators:\n  - x*dq +\n").unwrap();
    let out = folia(&["check", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.sfo"));
}

#[test]
fn missing_file_and_bad_usage_exit_one() {
    assert_eq!(folia(&["check", "/definitely/not/here.sfo"]).status.code(), Some(1));
    assert_eq!(folia(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(folia(&["dims", &path("rotation.sfo"), "--point", "1,2,3"]).status.code(), Some(1));
}

#[test]
fn every_report_carries_a_schema() {
    let rot = path("rotation.sfo");
    let cases: Vec<Vec<&str>> = vec![
        vec!["proj", &rot],
        vec!["leaf", &rot, "--from", "1,0", "--to", "0,1"],
        vec!["exp", &rot, "--lambda", "1", "--point", "1,0"],
        vec!["differentiate", &rot, "--family", "l"],
        vec!["integrate", "--algebra", "so3", "--basis", "0,0,1"],
    ];
    for args in cases {
        let (code, v) = folia_json(&args);
        assert_eq!(code, 0, "{args:?}");
        assert!(v["schema"].as_str().unwrap().starts_with("folia."), "{args:?}");
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let p = dir.path().join(name);
        let out = Command::new(env!("CARGO_BIN_EXE_folia"))
            .env("FOLIA_THREADS", threads)
            .args(["family", &path("rotation.sfo"), "--triples", "40", "--seed", "7", "--json", p.to_str().unwrap()])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        std::fs::read(p).unwrap()
    };
    let a = run("a.json", "1");
    let b = run("b.json", "1");
    let c = run("c.json", "4");
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn bad_thread_count_exits_one() {
    let out = Command::new(env!("CARGO_BIN_EXE_folia")).env("FOLIA_THREADS", "zero").args(["check", &path("rotation.sfo")]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn graph_eq_distinguishes_linear_from_translation() {
    let (code, v) = folia_json(&["graph-eq", &path("linear.sfo"), &path("translation.sfo"), "--values=-1,0,1"]);
    assert_eq!(code, 2);
    assert!(!v["disagreements"].as_array().unwrap().is_empty(), "{v}");
}

#[test]
fn integrate_detects_closed_and_non_subalgebra() {
    let (code, v) = folia_json(&["integrate", "--algebra", "so3", "--basis", "0,0,1"]);
    assert_eq!(code, 0);
    assert_eq!(v["dimension"], 1);
    let out = folia(&["integrate", "--algebra", "so3", "--basis", "1,0,0", "--basis", "0,1,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn counterexamples_run() {
    let (code, v) = folia_json(&["counterexample", "openness", "--samples", "6"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], "folia.counterexample.openness/1");
    let (code, v) = folia_json(&["counterexample", "subspace", &path("square.sfo"), "--family", "x + l*x"]);
    assert_eq!(code, 0);
    assert_eq!(v["member"], false);
    assert_eq!(v["preserves_sampled_leaves"], true);
}

#[test]
fn render_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    for (kind, file) in [("leaves", "rotation.sfo"), ("strata", "vanish_origin.sfo"), ("bisection", "linear.sfo")] {
        let out = dir.path().join(format!("{kind}.svg"));
        let o = folia(&["render", &path(file), "--kind", kind, "--cells", "6", "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let svg = std::fs::read_to_string(&out).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }
}
