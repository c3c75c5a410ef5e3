use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use overlap_gen::fixtures::corpus;
use overlap_gen::genfn::ProbeConfig;
use overlap_gen::spec_file::PairSpec;
use serde_json::Value;
use tempfile::TempDir;

fn specs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs")
}

fn spec(name: &str) -> PathBuf {
    specs().join(name)
}

fn overlap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_overlap")).args(args).output().expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Runs with `--report` into `dir` and returns the exit code and report.
fn run_report(dir: &TempDir, args: &[&str]) -> (i32, Value) {
    let report = dir.path().join("report.json");
    let mut all = args.to_vec();
    all.extend(["--quiet", "--report", path(&report)]);
    let out = overlap(&all);
    let text = fs::read_to_string(&report).expect("report written");
    (out.status.code().unwrap(), serde_json::from_str(&text).unwrap())
}

#[test]
fn spec_files_match_fixture_corpus() {
    for f in corpus() {
        let text = fs::read_to_string(spec(&format!("{}.json", f.name))).unwrap();
        let (pair, _) = PairSpec::from_json(&text).unwrap().build(&ProbeConfig::default()).unwrap();
        assert_eq!(pair, f.pair, "{}", f.name);
    }
}

#[test]
fn validate_product_pair() {
    let dir = TempDir::new().unwrap();
    let (code, r) = run_report(&dir, &["validate", path(&spec("product.json"))]);
    assert_eq!(code, 0);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["exit_code"], 0);
    assert_eq!(r["results"]["verdict"], "valid");
    assert_eq!(r["results"]["validation"]["overall"], "valid");
    assert_eq!(r["results"]["axioms"]["overall"], "pass");
    assert!(r["input_digest"].as_str().unwrap().starts_with("sha256:"));
}

#[test]
fn validate_finite_theta_reports_both_witnesses() {
    let dir = TempDir::new().unwrap();
    let (code, r) = run_report(&dir, &["validate", path(&spec("finite_theta_at_zero.json"))]);
    assert_eq!(code, 1);
    let t3 = &r["results"]["validation"]["conditions"]["T3_theta_infinity_iff_zero"];
    assert_eq!(t3["verdict"], "fail");
    assert!(!t3["witnesses"].as_array().unwrap().is_empty());
    let o2 = &r["results"]["axioms"]["axioms"]["O2_zero_iff_product_zero"];
    assert_eq!(o2["verdict"], "fail");
    let w = &o2["witnesses"][0]["points"][0];
    assert!(w["x"].is_number() && w["y"].is_number() && w["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn validate_exit_codes_over_corpus() {
    for f in corpus() {
        let out = overlap(&["validate", "--quiet", "--grid-n", "129", path(&spec(&format!("{}.json", f.name)))]);
        assert_eq!(out.status.code(), Some(if f.is_valid() { 0 } else { 1 }), "{}", f.name);
    }
}

#[test]
fn validate_malformed_spec() {
    let dir = TempDir::new().unwrap();
    let (code, r) = run_report(&dir, &["validate", path(&spec("malformed.json"))]);
    assert_eq!(code, 2);
    assert_eq!(r["results"]["error"]["code"], "ParseError");

    let missing = overlap(&["validate", "--quiet", "/nonexistent/spec.json"]);
    assert_eq!(missing.status.code(), Some(2));
    let bad_json = dir.path().join("bad.json");
    fs::write(&bad_json, "{\"theta\": ").unwrap();
    assert_eq!(overlap(&["validate", "--quiet", path(&bad_json)]).status.code(), Some(2));
}

#[test]
fn validate_spec_with_transform_chain() {
    let dir = TempDir::new().unwrap();
    let (code, r) = run_report(&dir, &["validate", path(&spec("product_with_chain.json"))]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["pair"]["anchor"], 0.0);
    assert_eq!(r["results"]["chain"].as_array().unwrap().len(), 2);
}

#[test]
fn reports_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let strip = |mut v: Value| {
        v["timing_ms"] = Value::Null;
        serde_json::to_string(&v).unwrap()
    };
    for file in ["product.json", "vartheta_jump.json"] {
        let (_, a) = run_report(&dir, &["validate", "--grid-n", "129", path(&spec(file))]);
        let (_, b) = run_report(&dir, &["validate", "--grid-n", "129", path(&spec(file))]);
        assert_eq!(strip(a), strip(b), "{file}");
    }
}

#[test]
fn transform_affine_outer_is_equivalent() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out.json");
    let product = spec("product.json");
    let args = ["transform", path(&product), "--op", "affine_outer", "--params", "k=2,b=3", "--out", path(&out)];
    let (code, r) = run_report(&dir, &args);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["equivalence"]["outcome"], "equal");
    assert_eq!(r["results"]["anchor"], 6.0);
    let written = PairSpec::from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    let (pair, _) = written.build(&ProbeConfig::default()).unwrap();
    assert_eq!(pair.anchor(), 6.0);
}

#[test]
fn transform_default_output_path() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("pair.json");
    fs::copy(spec("product.json"), &input).unwrap();
    let out = overlap(&["transform", "--quiet", path(&input), "--op", "shift", "--params", "b=1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("pair.transformed.json").is_file());
}

#[test]
fn transform_zero_slope_is_invalid_params() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out.json");
    let (code, r) = run_report(
        &dir,
        &["transform", path(&spec("product.json")), "--op", "affine_outer", "--params", "k=0,b=1", "--out", path(&out)],
    );
    assert_eq!(code, 1);
    assert_eq!(r["results"]["error"]["code"], "InvalidParams");
    assert!(!out.exists());

    let (code, r) = run_report(&dir, &["transform", path(&spec("product.json")), "--op", "warp"]);
    assert_eq!(code, 1);
    assert_eq!(r["results"]["error"]["code"], "InvalidParams");

    let (code, _) = run_report(&dir, &["transform", path(&spec("product.json")), "--op", "shift", "--params", "b"]);
    assert_eq!(code, 2);
}

#[test]
fn transform_normalize_shifted_pair() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("norm.json");
    let (code, r) = run_report(
        &dir,
        &["transform", path(&spec("shifted_product.json")), "--op", "normalize", "--out", path(&out)],
    );
    assert_eq!(code, 0);
    assert_eq!(r["results"]["anchor"], 0.0);
    let (pair, _) =
        PairSpec::from_json(&fs::read_to_string(&out).unwrap()).unwrap().build(&ProbeConfig::default()).unwrap();
    assert_eq!(pair.anchor(), 0.0);
}

#[test]
fn transform_conjugated_routes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("c.json");
    for (op, params) in [("conjugated_outer", "k=2,b=1"), ("inner_composition_conjugate", "c=3,m=1")] {
        let (code, r) = run_report(
            &dir,
            &["transform", "--grid-n", "65", path(&spec("product.json")), "--op", op, "--params", params, "--out", path(&out)],
        );
        assert_eq!(code, 0, "{op}");
        assert_eq!(r["results"]["equivalence"]["outcome"], "equal", "{op}");
        assert!(PairSpec::from_json(&fs::read_to_string(&out).unwrap()).is_ok(), "{op}");
    }
}

#[test]
fn falsify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let theta_new = |f: &str| specs().join("theta_new").join(f);
    let product = spec("product.json");

    let (code, r) = run_report(&dir, &["falsify", path(&product), "--theta-new", path(&theta_new("squared_neg_log.json"))]);
    assert_eq!(code, 3);
    let v = &r["results"]["verdict"];
    assert_eq!(v["outcome"], "contradiction");
    let ln2 = 2f64.ln();
    assert!((v["rhs_sum_1"].as_f64().unwrap() - ln2).abs() <= 1e-12);
    assert!((v["rhs_sum_2"].as_f64().unwrap() - 2f64.sqrt() * ln2).abs() <= 1e-12);

    let (code, r) = run_report(&dir, &["falsify", path(&product), "--theta-new", path(&theta_new("affine_neg_log.json"))]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["verdict"]["outcome"], "consistent");

    let x1 = (7f64.sqrt() - 1.0) / 2.0;
    let at = format!("{x1},1");
    let (code, r) = run_report(
        &dir,
        &["falsify", path(&product), "--theta-new", path(&theta_new("bernstein_neg_log.json")), "--at", &at],
    );
    assert_eq!(code, 3);
    assert!((r["results"]["verdict"]["lhs_sum"].as_f64().unwrap() + 0.75f64.ln()).abs() <= 1e-12);

    let inline = r#"{"kind":"compose","outer":{"kind":"quadratic_h"},"inner":{"kind":"neg_log"}}"#;
    assert_eq!(overlap(&["falsify", "--quiet", path(&product), "--theta-new", inline]).status.code(), Some(3));
    assert_eq!(overlap(&["falsify", "--quiet", path(&product), "--theta-new", "neg_log"]).status.code(), Some(0));
    assert_eq!(overlap(&["falsify", "--quiet", path(&product), "--theta-new", "{\"kind\":"]).status.code(), Some(2));
    assert_eq!(overlap(&["falsify", "--quiet", path(&product), "--theta-new", "no_such_kind"]).status.code(), Some(2));
}

#[test]
fn grid_export_product() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("g.csv");
    let run = overlap(&["grid-export", path(&spec("product.json")), "--n", "3", "--out", path(&out)]);
    assert_eq!(run.status.code(), Some(0));
    let csv = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "x,y,value");
    assert_eq!(lines.len(), 10);
    assert_eq!(lines[5], "0.5,0.5,0.25");
    assert_eq!(lines[1..4], ["0,0,0", "0,0.5,0", "0,1,0"]);

    let stdout = overlap(&["grid-export", path(&spec("product.json")), "--n", "2"]);
    assert_eq!(String::from_utf8(stdout.stdout).unwrap(), "x,y,value\n0,0,0\n0,1,0\n1,0,0\n1,1,1\n");
}

#[test]
fn grid_export_seventeen_digits() {
    let out = overlap(&["grid-export", path(&spec("reciprocal_cauchy.json")), "--n", "4"]);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("0.33333333333333331,0.33333333333333331,")), "{csv}");
    for line in csv.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|t| t.parse().unwrap()).collect();
        let (x, y) = (v[0], v[1]);
        let want = if x == 0.0 || y == 0.0 { 0.0 } else { x * y / (x + y - x * y) };
        assert!((v[2] - want).abs() <= 1e-15, "{line}");
    }
}

#[test]
fn grid_export_range_error() {
    let dir = TempDir::new().unwrap();
    let (code, r) = run_report(&dir, &["grid-export", path(&spec("overshoot.json")), "--n", "3"]);
    assert_eq!(code, 1);
    assert_eq!(r["results"]["error"]["code"], "RangeError");
}

#[test]
fn catalog_lists_builtins() {
    let out = overlap(&["catalog"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in overlap_gen::genfn::Builtin::ALL_NAMES {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
}

#[test]
fn bad_global_flags() {
    assert_eq!(overlap(&["validate", "--quiet", "--grid-n", "1", path(&spec("product.json"))]).status.code(), Some(2));
    assert_eq!(overlap(&["frobnicate"]).status.code(), Some(2));
}
