use std::process::{Command, Output};

use serde_json::Value;

fn morse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_morse"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (Value, String, i32) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let o = morse(&full);
    let text = stdout(&o);
    (serde_json::from_str(&text).unwrap(), text, o.status.code().unwrap())
}

fn error_kind(o: &Output) -> String {
    let err: Value = serde_json::from_slice(&o.stderr).expect("error object on stderr");
    assert_eq!(err["schema"], 1);
    err["error"]["kind"].as_str().unwrap().to_string()
}

#[test]
fn sphere_conjugate_rows() {
    let (v, _, code) = json(&["conjugate", "--builtin", "sphere-constcurv", "--length", "2.5pi"]);
    assert_eq!(code, 0);
    let pts = v["conjugate_points"].as_array().unwrap();
    assert_eq!(pts.len(), 2);
    for (p, t) in pts.iter().zip([0.4, 0.8]) {
        assert!((p["t"].as_f64().unwrap() - t).abs() < 1e-6);
        assert_eq!(p["multiplicity"], 1);
    }
    let text = stdout(&morse(&["conjugate", "--builtin", "sphere-constcurv", "--length", "2.5pi"]));
    assert!(text.contains("0.4000000000") && text.contains("0.8000000000"), "{text}");
}

#[test]
fn nonpositive_builtins_have_no_conjugate_points() {
    for name in ["flat", "halfplane-metric2d", "hyperbolic-constcurv"] {
        let (v, _, code) = json(&["conjugate", "--builtin", name]);
        assert_eq!(code, 0, "{name}");
        assert_eq!(v["conjugate_points"].as_array().unwrap().len(), 0, "{name}");
    }
}

#[test]
fn index_examples() {
    for (args, expect) in [
        (vec!["index", "--builtin", "sphere-constcurv", "--length", "2.5pi"], 2),
        (vec!["index", "--builtin", "flat"], 0),
        (vec!["index", "--constant", "(1.5pi)^2"], 1),
        (vec!["index", "--builtin", "sphere-constcurv", "--length", "2.5pi", "--normal-dim", "2"], 4),
    ] {
        let (v, _, code) = json(&args);
        assert_eq!(code, 0);
        assert_eq!(v["index"], expect, "{args:?}");
        assert_eq!(v["schema"], 1);
        assert_eq!(v["command"], "index");
    }
}

#[test]
fn verify_sphere_agrees() {
    let (v, _, code) = json(&["verify", "--builtin", "sphere-constcurv", "--length", "2.5pi"]);
    assert_eq!(code, 0);
    assert_eq!(v["agree"], true);
    assert_eq!(v["mu_galerkin"], 2);
    assert_eq!(v["crossing_signature_sum"], -2);
    let d = &v["diagnostics"][0];
    let closed = d["closed_form"][0].as_f64().unwrap();
    let fd = d["finite_difference"][0].as_f64().unwrap();
    assert!((closed + 0.4).abs() < 1e-6 && (closed - fd).abs() < 1e-3 * closed.abs());
}

#[test]
fn degenerate_sphere_exits_2() {
    let o = morse(&["verify", "--builtin", "sphere-constcurv", "--length", "2pi"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_kind(&o), "degenerate");
    assert!(o.stdout.is_empty());
}

#[test]
fn degenerate_galerkin_index_exits_2() {
    // λ = 1 is a crossing when S = π²
    let o = morse(&["index", "--constant", "pi^2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_errors_exit_4() {
    for args in [
        vec!["verify"],
        vec!["verify", "--builtin", "torus"],
        vec!["verify", "--builtin", "flat", "--constant", "1"],
        vec!["verify", "--builtin", "flat", "--steps", "10"],
        vec!["verify", "--builtin", "flat", "--length", "2 furlongs"],
        vec!["verify", "--builtin", "flat", "--tol-kernel", "-1"],
        vec!["index", "--random", "3"],
        vec!["verify", "--builtin", "sphere-metric2d", "--normal-dim", "3"],
        vec!["verify", "--spec", "/nonexistent/spec.toml"],
        vec!["frobnicate"],
        vec!["verify", "--builtin", "flat", "--format", "yaml"],
    ] {
        let o = morse(&args);
        assert_eq!(o.status.code(), Some(4), "{args:?}");
        assert_eq!(error_kind(&o), "config", "{args:?}");
    }
}

#[test]
fn help_exits_0() {
    let o = morse(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verify"));
}

#[test]
fn json_round_trips_byte_identical() {
    for args in [
        vec!["verify", "--builtin", "sphere-constcurv", "--length", "2.5pi"],
        vec!["conjugate", "--builtin", "sphere-metric2d"],
        vec!["verify", "--random", "3", "--seed", "11", "--modes", "48", "--panels", "1024"],
    ] {
        let (v, text, _) = json(&args);
        let mut again = serde_json::to_string_pretty(&v).unwrap();
        again.push('\n');
        assert_eq!(again, text, "{args:?}");
    }
}

#[test]
fn random_suite_is_deterministic() {
    let args = ["verify", "--random", "4", "--seed", "7", "--modes", "48", "--panels", "1024", "--format", "json"];
    let a = morse(&args);
    let b = morse(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["input"]["prng"], "ChaCha8Rng");
    assert_eq!(v["input"]["seed"], 7);
    assert_eq!(v["summary"]["all_agree"], true);
    assert_eq!(v["trials"].as_array().unwrap().len(), 4);
    let text = stdout(&morse(&["verify", "--random", "4", "--seed", "7", "--modes", "48", "--panels", "1024"]));
    assert!(text.contains("4/4 trials agree"), "{text}");
}

#[test]
fn spec_file_and_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("sphere.toml");
    std::fs::write(
        &spec,
        "kind = \"metric2d\"\nlength = \"2.5pi\"\nstart = [\"pi/2\", 0]\ndirection = [0, 1]\n\n[metric]\ng11 = \"1\"\ng22 = \"sin(x)^2\"\n",
    )
    .unwrap();
    let out = dir.path().join("report.json");
    let o = morse(&[
        "verify",
        "--spec",
        spec.to_str().unwrap(),
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["mu_galerkin"], 2);
    assert_eq!(v["agree"], true);

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "kind = \"constant-curvature\"\nkappa = 1\nshape = \"round\"\n").unwrap();
    let o = morse(&["verify", "--spec", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn csv_outputs() {
    let o = morse(&["conjugate", "--builtin", "sphere-constcurv", "--length", "2.5pi", "--format", "csv"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,det_j,sigma_min,count"));
    assert_eq!(lines.count(), 2001);
    let o = morse(&["crossings", "--constant", "(2.5pi)^2", "--modes", "16", "--panels", "512", "--format", "csv"]);
    let text = stdout(&o);
    assert!(text.starts_with("lambda,ev1,"));
    assert_eq!(text.lines().count(), 202);
}

#[test]
fn crossings_match_conjugate_points() {
    let (v, _, code) = json(&["crossings", "--builtin", "sphere-constcurv", "--length", "2.5pi", "--modes", "32", "--panels", "1024"]);
    assert_eq!(code, 0);
    assert_eq!(v["matches_conjugate_points"], true);
    let c = v["crossings"].as_array().unwrap();
    assert_eq!(c.len(), 2);
    assert_eq!(c[0]["signature"], -1);
}
