use std::process::{Command, Output};

fn scexp(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_scexp"));
    cmd.args(args);
    for var in ["SCEXP_GRAD_TOL", "SCEXP_INNER_GRAD_TOL", "SCEXP_LAMBDA_DELTA", "SCEXP_LAMBDA_TOL"] {
        cmd.env_remove(var);
    }
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("scexp runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn temp_file(name: &str, contents: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("scexp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn exponent_curve_columns_and_closed_form() {
    let o = scexp(&["exponent-curve", "--channel", "preset:identity:2", "--rates", "1,2.5,3"], &[]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(
        rows[0],
        ["R", "sc", "lambda_star", "alpha_star", "truncation_bound", "inner_iterations", "status", "lambda_delta", "grad_tol", "lambda_tol"]
    );
    for (row, expected) in rows[1..].iter().zip([0.0, 0.5, 1.0]) {
        let sc: f64 = row[1].parse().unwrap();
        assert!((sc - expected).abs() < 2e-4, "{row:?}");
        assert_eq!(row[6], "ok");
    }
}

#[test]
fn divergence_of_a_commuting_pair() {
    let o = scexp(&["divergence", "--rho", "diag:0.5,0.5", "--sigma", "diag:0.75,0.25", "--alpha", "2"], &[]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    let s: f64 = rows[1][2].parse().unwrap();
    let f: f64 = rows[1][3].parse().unwrap();
    let exact = (4.0f64 / 3.0).log2();
    assert!((s - exact).abs() < 1e-12 && (f - exact).abs() < 1e-12);
}

#[test]
fn environment_overrides_tolerances() {
    let o = scexp(
        &["channel-info", "--channel", "preset:dephasing:0.2", "--alpha", "2"],
        &[("SCEXP_GRAD_TOL", "2e-6")],
    );
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[1][7], "2e-6");
    let flag = scexp(
        &["channel-info", "--channel", "preset:dephasing:0.2", "--alpha", "2", "--tolerance", "3e-6"],
        &[("SCEXP_GRAD_TOL", "2e-6")],
    );
    assert_eq!(csv_rows(&stdout(&flag))[1][7], "3e-6");
}

#[test]
fn kraus_file_channel() {
    let path = temp_file(
        "id.json",
        r#"{"name": "id", "input_dim": 2, "output_dim": 2, "kraus": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]]]}"#,
    );
    let o = scexp(&["channel-info", "--channel", path.to_str().unwrap(), "--alpha", "2", "--format", "jsonl"], &[]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    assert!((v["information"].as_f64().unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn malformed_input_exits_with_validation_code() {
    let path = temp_file("bad.json", "{\"kraus\": [[[1, 0]]\n");
    let o = scexp(&["channel-info", "--channel", path.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.json:1:"), "{err}");

    let o = scexp(&["exponent-curve", "--channel", "preset:depolarizing:0.1", "--rates", "-1"], &[]);
    assert_eq!(o.status.code(), Some(2));
    let o = scexp(&["verify", "nope"], &[]);
    assert_eq!(o.status.code(), Some(2));
    let path = temp_file("not-channel.json", r#"{"kraus": [[[[1, 0], [0, 0]], [[0, 0], [0.5, 0]]]]}"#);
    let o = scexp(&["channel-info", "--channel", path.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn solver_failure_exits_with_solver_code() {
    let o = scexp(
        &["channel-info", "--channel", "preset:amplitude-damping:0.3", "--alpha", "2", "--tolerance", "1e-300"],
        &[],
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("solver_failure"));
}

#[test]
fn dense_coding_simulation_record() {
    let o = scexp(
        &["simulate", "--channel", "preset:identity:2", "--rate", "2", "--blocklengths", "1", "--sampling", "without-replacement", "--no-exponent"],
        &[],
    );
    assert!(o.status.success());
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["record"], "point");
    assert_eq!(lines[0]["success_probability"].as_f64(), Some(1.0));
    assert_eq!(lines[0]["exponent"].as_f64(), Some(0.0));
    assert_eq!(lines[1]["record"], "fit");
}

#[test]
fn verify_reports_in_text_and_jsonl() {
    let o = scexp(&["verify", "commuting"], &[]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("PASS commuting"));
    let o = scexp(&["verify", "dominance", "--format", "jsonl"], &[]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["cases"], 600);
}
