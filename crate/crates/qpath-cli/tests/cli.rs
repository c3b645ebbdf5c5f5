//! End-to-end tests of the binary: spawn the real executable, parse its
//! JSON envelope, and check payloads, exit codes, and the cap controls.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn write_circuit(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("qpath-cli-tests");
    std::fs::create_dir_all(&dir).expect("create temp dir");
    let path = dir.join(name);
    std::fs::write(&path, text).expect("write circuit file");
    path
}

fn run(args: &[&str], envs: &[(&str, &str)]) -> (Output, Value) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qpath"));
    cmd.args(args);
    // The cap variable must not leak between tests.
    cmd.env_remove("QPATH_CAP");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let output = cmd.output().expect("binary runs");
    let stdout = String::from_utf8(output.stdout.clone()).expect("utf8 stdout");
    let envelope: Value =
        serde_json::from_str(stdout.trim()).unwrap_or_else(|e| panic!("bad JSON ({e}): {stdout}"));
    (output, envelope)
}

fn payload(envelope: &Value) -> &Value {
    assert_eq!(envelope["schema_version"], 1, "{envelope}");
    &envelope["payload"]
}

#[test]
fn amp_fourier_matches_closed_form() {
    let path = write_circuit("f3.qc", "d 3\nn 1\nF 0\n");
    let (out, env) = run(
        &["amp", "--circuit", path.to_str().unwrap(), "--in", "1", "--out", "2"],
        &[],
    );
    assert!(out.status.success());
    let p = payload(&env);
    // (1/sqrt(3)) chi(2): the third root of unity scaled by 1/sqrt(3).
    let re = p["re"].as_f64().unwrap();
    let im = p["im"].as_f64().unwrap();
    assert!((re - (-0.288_675_134_594_813)).abs() < 1e-12, "re = {re}");
    assert!((im - (-0.5)).abs() < 1e-12, "im = {im}");
    assert_eq!(p["exact"]["counts"], serde_json::json!([0, 0, 1]));
    assert_eq!(p["exact"]["half_power"], 1);
}

#[test]
fn amp_identity_and_delta_cases() {
    let id = write_circuit("id3.qc", "d 3\nn 1\nID 0\n");
    let (out, env) = run(
        &["amp", "--circuit", id.to_str().unwrap(), "--in", "1", "--out", "1"],
        &[],
    );
    assert!(out.status.success());
    assert_eq!(payload(&env)["re"].as_f64().unwrap(), 1.0);
    assert_eq!(payload(&env)["im"].as_f64().unwrap(), 0.0);

    let r = write_circuit("r3.qc", "d 3\nn 1\nR 0\n");
    let (out, env) = run(
        &["amp", "--circuit", r.to_str().unwrap(), "--in", "1", "--out", "2"],
        &[],
    );
    assert!(out.status.success());
    assert_eq!(payload(&env)["re"].as_f64().unwrap(), 0.0);
    assert_eq!(payload(&env)["im"].as_f64().unwrap(), 0.0);
}

#[test]
fn amp_methods_agree_on_a_composite_circuit() {
    let path = write_circuit(
        "mix.qc",
        "d 5\nn 2\nF 0\nSUM 0 1\nR 1\nF 1\nSUM 1 0\nF 0\n",
    );
    let mut amps = Vec::new();
    for method in ["pathsum", "gauss", "dense"] {
        let (out, env) = run(
            &[
                "amp",
                "--circuit",
                path.to_str().unwrap(),
                "--in",
                "1,2",
                "--out",
                "3,4",
                "--method",
                method,
            ],
            &[],
        );
        assert!(out.status.success(), "{method}");
        let p = payload(&env);
        assert_eq!(p["exact"].is_object(), method != "dense", "{method}");
        amps.push((
            p["re"].as_f64().unwrap(),
            p["im"].as_f64().unwrap(),
        ));
    }
    for pair in amps.windows(2) {
        let dre = (pair[0].0 - pair[1].0).abs();
        let dim = (pair[0].1 - pair[1].1).abs();
        assert!(dre < 1e-9 && dim < 1e-9, "{amps:?}");
    }
}

#[test]
fn amp_rejects_bad_points() {
    let path = write_circuit("f3b.qc", "d 3\nn 1\nF 0\n");
    let (out, env) = run(
        &["amp", "--circuit", path.to_str().unwrap(), "--in", "7", "--out", "0"],
        &[],
    );
    assert!(!out.status.success());
    assert_eq!(env["status"], "error");
    let (out, env) = run(
        &["amp", "--circuit", path.to_str().unwrap(), "--in", "1,2", "--out", "0"],
        &[],
    );
    assert!(!out.status.success());
    assert_eq!(env["status"], "error");
}

#[test]
fn cap_env_var_limits_enumeration_and_flag_overrides_it() {
    // Two Fourier gates on one wire leave a 1-dimensional solution set,
    // 3 points, which exceeds a cap of 1.
    let path = write_circuit("ff.qc", "d 3\nn 1\nF 0\nF 0\n");
    let args = [
        "amp",
        "--circuit",
        path.to_str().unwrap(),
        "--in",
        "0",
        "--out",
        "0",
    ];
    let (out, env) = run(&args, &[("QPATH_CAP", "1")]);
    assert!(!out.status.success());
    assert_eq!(env["status"], "error");

    let mut with_cap = args.to_vec();
    with_cap.extend(["--cap", "100"]);
    let (out, _) = run(&with_cap, &[("QPATH_CAP", "1")]);
    assert!(out.status.success(), "--cap must override QPATH_CAP");

    // The quadratic-sum method never enumerates, so the cap is irrelevant.
    let mut gauss = args.to_vec();
    gauss.extend(["--method", "gauss"]);
    let (out, _) = run(&gauss, &[("QPATH_CAP", "1")]);
    assert!(out.status.success());
}

#[test]
fn genfun_renders_closed_forms() {
    let (out, env) = run(&["genfun", "--gate", "F", "--d", "5"], &[]);
    assert!(out.status.success());
    assert_eq!(payload(&env)["polynomial"], "q*Q");

    let (out, env) = run(&["genfun", "--gate", "SUM", "--d", "7"], &[]);
    assert!(out.status.success());
    assert_eq!(payload(&env)["polynomial"], "0");

    let (out, env) = run(&["genfun", "--gate", "WAT", "--d", "5"], &[]);
    assert!(!out.status.success());
    assert_eq!(env["status"], "error");
}

#[test]
fn symplectic_of_single_fourier_gate() {
    let path = write_circuit("f3c.qc", "d 3\nn 1\nF 0\n");
    let (out, env) = run(&["symplectic", "--circuit", path.to_str().unwrap()], &[]);
    assert!(out.status.success());
    let p = payload(&env);
    assert_eq!(p["s"], serde_json::json!([[0, 2], [1, 0]]));
    assert_eq!(p["a"], serde_json::json!([0, 0]));
}

#[test]
fn wigner_of_position_state_is_a_uniform_line() {
    let path = write_circuit("id3b.qc", "d 3\nn 1\nID 0\n");
    let (out, env) = run(
        &["wigner", "--circuit", path.to_str().unwrap(), "--state", "0"],
        &[],
    );
    assert!(out.status.success());
    let values = payload(&env)["values"].as_array().unwrap();
    assert_eq!(values.len(), 9);
    // Index q + 3p: the q = 0 column carries 1/3 at every momentum.
    for (idx, v) in values.iter().enumerate() {
        let expect = if idx % 3 == 0 { 1.0 / 3.0 } else { 0.0 };
        assert!((v.as_f64().unwrap() - expect).abs() < 1e-12, "index {idx}");
    }
}

#[test]
fn verify_suite_passes_and_unknown_suite_fails() {
    let (out, env) = run(
        &["verify", "--suite", "balanced", "--seed", "7", "--count", "5"],
        &[],
    );
    assert!(out.status.success());
    let p = payload(&env);
    assert_eq!(p["passed"], true);
    assert_eq!(p["seed"], 7);
    assert_eq!(p["rng"], "chacha8-stream");
    assert!(p["campaigns"].as_array().unwrap().iter().all(|c| {
        c["passed"] == true && c["failures"].as_array().unwrap().is_empty()
    }));

    let (out, env) = run(&["verify", "--suite", "bogus"], &[]);
    assert!(!out.status.success());
    assert_eq!(env["status"], "error");
}

#[test]
fn verify_output_is_deterministic_for_a_fixed_seed() {
    let args = ["verify", "--suite", "main-disc", "--seed", "11", "--count", "6"];
    let (_, first) = run(&args, &[]);
    let (_, second) = run(&args, &[]);
    // Timing differs run to run; the payload must not.
    assert_eq!(first["payload"], second["payload"]);
}

#[test]
fn parse_identifies_both_formats_and_rejects_garbage() {
    let disc = write_circuit("p1.qc", "d 5\nn 2\nF 0\nSUM 0 1\n");
    let (out, env) = run(&["parse", "--circuit", disc.to_str().unwrap()], &[]);
    assert!(out.status.success());
    assert_eq!(payload(&env)["format"], "discrete");

    let cv = write_circuit("p2.qc", "cv\nn 2\nF 0\nP 1 -1/2\nSUM 0 1\n");
    let (out, env) = run(&["parse", "--circuit", cv.to_str().unwrap()], &[]);
    assert!(out.status.success());
    assert_eq!(payload(&env)["format"], "cv");
    assert_eq!(payload(&env)["gates"].as_array().unwrap().len(), 3);

    let bad = write_circuit("p3.qc", "hello world\n");
    let (out, env) = run(&["parse", "--circuit", bad.to_str().unwrap()], &[]);
    assert!(!out.status.success());
    assert_eq!(env["status"], "error");
}

#[test]
fn pretty_flag_expands_the_envelope() {
    let (out, _) = run(&["genfun", "--gate", "F", "--d", "3", "--pretty"], &[]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() > 3, "expected multi-line output");
}
