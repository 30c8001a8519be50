//! End-to-end runs of the compiled binary: output formats, exit codes,
//! catalog loading, and the check semantics of each subcommand.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_isogeo"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn scratch(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("isogeo-cli-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn catalog_lists_builtins_in_order() {
    let out = run(&["catalog"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let names: Vec<&str> = text.lines().collect();
    assert_eq!(
        names,
        [
            "minkowski",
            "schwarzschild",
            "eddington-finkelstein",
            "kerr",
            "pp-wave",
            "kasner",
            "conformally-flat-exp",
            "de-sitter",
        ]
    );
}

#[test]
fn catalog_detail_shows_chart_and_components() {
    let out = run(&["catalog", "--metric", "pp-wave"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("chart u v x y"), "{text}");
    assert!(text.contains("g u u"), "{text}");
    assert!(text.contains("g u v"), "{text}");
}

#[test]
fn classify_reports_doubly_degenerate_vacuum() {
    let out = run(&[
        "classify",
        "--metric",
        "schwarzschild",
        "--point",
        "0,5,1.2,0.3",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("type: D"), "{text}");
    assert!(text.contains("principal direction"), "{text}");
}

#[test]
fn classify_json_is_parseable_and_typed() {
    let out = run(&[
        "classify",
        "--metric",
        "minkowski",
        "--point",
        "0,1,2,3",
        "--json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(v["type"], "O");
}

#[test]
fn classify_grid_keeps_point_order() {
    let out = run(&[
        "classify",
        "--metric",
        "kerr",
        "--point",
        "0,4,1.1,0.8",
        "--grid",
        "r=3:9:3",
        "--json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    let arr = v.as_array().expect("array");
    assert_eq!(arr.len(), 3);
    let radii: Vec<f64> = arr
        .iter()
        .map(|c| c["point"][1].as_f64().expect("finite radius"))
        .collect();
    assert_eq!(radii, [3.0, 6.0, 9.0]);
    for c in arr {
        assert_eq!(c["type"], "D");
    }
}

#[test]
fn classify_grid_skips_guarded_points() {
    let out = run(&[
        "classify",
        "--metric",
        "schwarzschild",
        "--point",
        "0,5,1.2,0.3",
        "--grid",
        "r=1:5:2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].contains("skipped"), "{text}");
    assert!(lines[1].contains("D"), "{text}");
}

#[test]
fn geodesic_csv_starts_with_header_and_stays_null() {
    let out = run(&[
        "geodesic",
        "--metric",
        "schwarzschild",
        "--point",
        "0,6,1.3,0.2",
        "--velocity",
        "1,0.02,0.1,0.08",
        "--project-null",
        "--span",
        "3",
        "--csv",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "s,x0,x1,x2,x3,xi0,xi1,xi2,xi3,nullnorm"
    );
    for line in lines {
        let norm: f64 = line.split(',').last().unwrap().parse().unwrap();
        assert!(norm.abs() < 1e-9, "ray left the light cone: {line}");
    }
}

#[test]
fn conformal_null_ray_passes_its_check() {
    let out = run(&[
        "conformal",
        "--metric",
        "schwarzschild",
        "--point",
        "0,6,1.3,0.2",
        "--velocity",
        "1,0.02,0.1,0.08",
        "--project-null",
        "--sigma",
        "exp(0.2*t)",
        "--span",
        "6",
        "--check-tol",
        "1e-6",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("max path deviation"));
}

#[test]
fn conformal_timelike_line_fails_its_check() {
    let out = run(&[
        "conformal",
        "--metric",
        "schwarzschild",
        "--point",
        "0,6,1.3,0.2",
        "--velocity",
        "1,0.02,0.05,0.04",
        "--sigma",
        "exp(0.2*t)",
        "--span",
        "6",
        "--check-tol",
        "1e-3",
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    assert!(stderr(&out).contains("deviation"), "{}", stderr(&out));
}

#[test]
fn horizon_slice_is_lightlike_and_its_flow_stays_put() {
    let out = run(&[
        "hypersurface",
        "--metric",
        "eddington-finkelstein",
        "--point",
        "0,2,1.2,0.3",
        "--surface",
        "r - 2*M",
        "--flow",
        "5",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("lightlike: true"), "{text}");
    assert!(text.contains("level drift"), "{text}");
}

#[test]
fn off_horizon_slice_is_rejected() {
    let out = run(&[
        "hypersurface",
        "--metric",
        "eddington-finkelstein",
        "--point",
        "0,3,1.2,0.3",
        "--surface",
        "r - 3",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("not lightlike"));
}

#[test]
fn principal_congruence_tracks_its_root() {
    let out = run(&[
        "principal",
        "--metric",
        "schwarzschild",
        "--point",
        "0,5,1.2,0.3",
        "--steps",
        "100",
        "--json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(v["termination"], "parameter-end");
    let samples = v["samples"].as_array().expect("samples");
    assert_eq!(samples.len(), 101);
    assert_eq!(samples[0]["type"], "D");
    assert_eq!(samples[samples.len() - 1]["type"], "D");
}

#[test]
fn principal_on_flat_space_reports_ambiguity() {
    let out = run(&["principal", "--metric", "minkowski", "--point", "0,1,1,1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("ambiguous"));
}

#[test]
fn unknown_metric_is_a_hard_error() {
    let out = run(&["classify", "--metric", "nope", "--point", "0,0,0,0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("minkowski"), "{}", stderr(&out));
}

#[test]
fn extra_catalog_file_extends_the_builtins() {
    let path = scratch("extra-catalog.txt");
    fs::write(
        &path,
        "metric stretched-flat\n  chart t x y z\n  param s 4.0\n  g 0 0  s\n  g 1 1  -s\n  g 2 2  -s\n  g 3 3  -s\nend\n",
    )
    .unwrap();
    let out = run(&[
        "classify",
        "--metric",
        "stretched-flat",
        "--catalog",
        path.to_str().unwrap(),
        "--point",
        "0,1,2,3",
    ]);
    fs::remove_file(&path).ok();
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("type: O"));
}

#[test]
fn out_flag_writes_the_payload_to_a_file() {
    let path = scratch("classify-out.json");
    let out = run(&[
        "classify",
        "--metric",
        "schwarzschild",
        "--point",
        "0,5,1.2,0.3",
        "--json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty());
    let payload = fs::read_to_string(&path).unwrap();
    fs::remove_file(&path).ok();
    let v: serde_json::Value = serde_json::from_str(&payload).expect("valid json");
    assert_eq!(v["type"], "D");
}

#[test]
fn parameter_overrides_reach_the_metric() {
    // with M = 2 the horizon sits at r = 4, so r = 3 must be rejected
    let out = run(&[
        "classify",
        "--metric",
        "schwarzschild",
        "--params",
        "M=2",
        "--point",
        "0,3,1.2,0.3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("guard"), "{}", stderr(&out));

    let out = run(&[
        "classify",
        "--metric",
        "schwarzschild",
        "--params",
        "M=2",
        "--point",
        "0,5,1.2,0.3",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("type: D"));
}
