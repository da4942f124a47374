use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ree_css(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ree-css"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn example_pipeline_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    let out = ree_css(d, &["example-sigma", "--out", "s.json"]);
    assert_eq!(out.status.code(), Some(0));

    let out = ree_css(d, &["hyperplane", "--sigma", "s.json", "--out", "phi.json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["kernel_dimension"], 2);
    assert!(v["offset"].as_f64().unwrap().abs() < 1e-10);

    let out = ree_css(
        d,
        &["inverse-css", "--sigma", "s.json", "--phi", "phi.json", "--x-frac", "0.5", "--out", "r.json"],
    );
    assert_eq!(out.status.code(), Some(0));
    let closed = json(&out)["ree"]["nats"].as_f64().unwrap();

    let out = ree_css(d, &["ree", "--rho", "r.json", "--sigma", "s.json"]);
    assert_eq!(out.status.code(), Some(0));
    let direct = json(&out)["value"].as_f64().unwrap();
    assert!((closed - direct).abs() < 1e-12, "{closed} vs {direct}");

    let out = ree_css(d, &["verify-css", "--rho", "r.json", "--sigma", "s.json", "--restarts", "50"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["holds"], true);

    let out = ree_css(
        d,
        &["oracle-css", "--rho", "r.json", "--restarts", "4", "--out", "ss.json", "--report", "rep.json"],
    );
    assert_eq!(out.status.code(), Some(0));
    let obj = json(&out)["objective"].as_f64().unwrap();
    assert!((obj - direct).abs() < 1e-6);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(d.join("rep.json")).unwrap()).unwrap();
    assert_eq!(report["converged"], true);

    let sigma = ree_css::io::read_density(&d.join("s.json")).unwrap();
    let found = ree_css::io::read_density(&d.join("ss.json")).unwrap();
    assert!(found.distance(&sigma) < 1e-4);
}

#[test]
fn generated_state_and_bits() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = ree_css(d, &["gen-boundary", "--m", "3", "--k", "2", "--seed", "4", "--out", "s.json"]);
    assert_eq!(out.status.code(), Some(0));
    let out = ree_css(d, &["hyperplane", "--sigma", "s.json", "--out", "phi.json"]);
    assert_eq!(json(&out)["kernel_dimension"], 2);
    let out = ree_css(
        d,
        &["inverse-css", "--sigma", "s.json", "--phi", "phi.json", "--x-frac", "1", "--out", "r.json"],
    );
    assert_eq!(out.status.code(), Some(0));
    let nats = json(&ree_css(d, &["ree", "--rho", "r.json", "--sigma", "s.json"]))["value"]
        .as_f64()
        .unwrap();
    let bits = json(&ree_css(d, &["ree", "--rho", "r.json", "--sigma", "s.json", "--bits"]))["value"]
        .as_f64()
        .unwrap();
    assert!((bits * std::f64::consts::LN_2 - nats).abs() < 1e-14);
}

#[test]
fn failures_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(ree_css(d, &["no-such-command"]).status.code(), Some(1));
    assert_eq!(ree_css(d, &["--help"]).status.code(), Some(0));
    assert_eq!(ree_css(d, &["ree", "--rho", "missing.json", "--sigma", "x.json"]).status.code(), Some(1));
    assert_eq!(ree_css(d, &["gen-boundary", "--m", "2", "--k", "2", "--out", "s.json"]).status.code(), Some(1));
    assert_eq!(ree_css(d, &["appendix-suite", "--n", "1"]).status.code(), Some(1));

    std::fs::write(d.join("bad.json"), r#"{"dims":[2],"re":[[1,2],[0,1]],"im":[[0,0],[0,0]]}"#).unwrap();
    assert_eq!(ree_css(d, &["ree", "--rho", "bad.json", "--sigma", "bad.json"]).status.code(), Some(1));

    ree_css(d, &["example-sigma", "--out", "s.json"]);
    ree_css(d, &["hyperplane", "--sigma", "s.json", "--out", "phi.json"]);
    ree_css(d, &["inverse-css", "--sigma", "s.json", "--phi", "phi.json", "--x-frac", "1", "--out", "r.json"]);
    // an entangled state is not a valid closest PPT state
    let out = ree_css(d, &["verify-css", "--rho", "r.json", "--sigma", "r.json", "--restarts", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["holds"], false);
    // beyond x_max the family leaves the state space
    let out = ree_css(
        d,
        &["inverse-css", "--sigma", "s.json", "--phi", "phi.json", "--x-frac", "1.5", "--out", "q.json"],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn appendix_suite_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = ree_css(
        d,
        &["appendix-suite", "--samples", "40", "--n", "4", "--seed", "1", "--report", "a.json"],
    );
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(d.join("a.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["properties"].as_array().unwrap().len(), 8);
}

#[test]
fn in_process_entry_point() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = ree_css::cli::run_with(["ree-css", "--version"], &mut out, &mut err);
    assert_eq!(code, 0);
    assert!(String::from_utf8(out).unwrap().contains("ree-css"));
}

#[test]
fn singlet_in_bits() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let re = [[0.0, 0.0, 0.0, 0.0], [0.0, 0.5, -0.5, 0.0], [0.0, -0.5, 0.5, 0.0], [0.0, 0.0, 0.0, 0.0]];
    let file = serde_json::json!({ "dims": [2, 2], "re": re, "im": vec![[0.0; 4]; 4] });
    std::fs::write(d.join("bell.json"), file.to_string()).unwrap();
    let out = ree_css(d, &["oracle-css", "--rho", "bell.json", "--restarts", "2", "--bits", "--out", "s.json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let value = v["objective"].as_f64().unwrap();
    assert!((value - 1.0).abs() < 1e-4, "{v}");
    let out = ree_css(d, &["verify-css", "--rho", "bell.json", "--sigma", "s.json", "--tol", "1e-4"]);
    assert_eq!(out.status.code(), Some(0), "{}", json(&out));
}
