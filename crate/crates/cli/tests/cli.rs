use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gns(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gns"))
        .args(args)
        .output()
        .expect("gns runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn hypotheses_accepts_a_worked_set() {
    let out = gns(&["hypotheses", "--set", "h2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["label"], "H2");
    // n/p0 = n/p + 2α/ρ with n = 3, p = 3, α = 1, ρ = 6.
    let p0 = v["p0"].as_f64().unwrap();
    assert!((3.0 / p0 - (1.0 + 2.0 / 6.0)).abs() < 1e-12);
}

#[test]
fn hypotheses_rejects_and_reports_violations() {
    // α = 1/2 is outside the admissible range.
    let out = gns(&["hypotheses", "--m", "2", "--n", "3", "--p", "3", "--alpha", "0.5", "--rho", "6"]);
    assert_eq!(code(&out), 2);
    let v = json(&out);
    assert_eq!(v["valid"], false);
    assert!(!v["violations"].as_array().unwrap().is_empty());
}

#[test]
fn malformed_arguments_exit_one() {
    assert_eq!(code(&gns(&["hypotheses", "--m", "two"])), 1);
    assert_eq!(code(&gns(&["hypotheses", "--m", "2"])), 1);
    assert_eq!(code(&gns(&["frobnicate"])), 1);
    assert_eq!(code(&gns(&["scaling", "--set", "h0", "--preset", "single-mode", "--lambda", "3"])), 1);
}

#[test]
fn lemma_ab_has_no_violations() {
    let out = gns(&["verify", "--ineq", "lemma-ab", "--samples", "20000", "--seed", "3"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["violations"], 0);
}

#[test]
fn verify_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let out_dir = dir.path().join(sub);
        let out = gns(&[
            "verify", "--ineq", "PROD1", "--set", "h0", "--samples", "12", "--seed", "9",
            "--out", out_dir.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        (out.stdout, fs::read(out_dir.join("PROD1.json")).unwrap())
    };
    let a = run("a");
    let b = run("b");
    assert_eq!(a, b);
}

#[test]
fn verify_refuses_inapplicable_inequalities() {
    // The bilinear estimate for m = 1 needs m = 1.
    let out = gns(&["verify", "--ineq", "BILIN_M1", "--set", "h2", "--samples", "12"]);
    assert_ne!(code(&out), 0);
}

fn read_diag(dir: &Path) -> serde_json::Value {
    serde_json::from_slice(&fs::read(dir.join("diagnostics.json")).unwrap()).unwrap()
}

#[test]
fn solve_taylor_green_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = gns(&["solve", "--preset", "taylor-green", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let d = read_diag(dir.path());
    assert_eq!(d["converged"], true);
    assert!(d["iterations"].as_u64().unwrap() <= 2);
    assert!(dir.path().join("norms.csv").exists());
    assert!(dir.path().join("fields/u_0000.gnsf").exists());
    assert!(dir.path().join("fields/grad_pi_0000.gnsf").exists());
    assert!(dir.path().join("fields/times.csv").exists());

    // The stored initial field has the Taylor–Green norm reported by `norms`.
    let field = dir.path().join("fields/u_0000.gnsf");
    let out = gns(&["norms", "--field", field.to_str().unwrap(), "--s", "0", "--p", "2", "--r", "2"]);
    assert_eq!(code(&out), 0);
    assert!(json(&out)["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn solve_zero_data_is_trivial() {
    let dir = tempfile::tempdir().unwrap();
    let out = gns(&["solve", "--preset", "zero-data", "--no-fields", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(!dir.path().join("fields").exists());
    let d = read_diag(dir.path());
    assert_eq!(d["norms"]["u_solution"].as_f64().unwrap(), 0.0);
}

#[test]
fn solve_large_data_aborts_at_the_gate() {
    let dir = tempfile::tempdir().unwrap();
    let out = gns(&["solve", "--preset", "large-amplitude", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    let d = read_diag(dir.path());
    assert_eq!(d["gate"], false);
    assert!(d["reason"].as_str().unwrap().contains("discriminant"));
}

#[test]
fn solve_reads_a_config_with_relative_data() {
    let dir = tempfile::tempdir().unwrap();
    // Produce a field with the CLI itself, then feed it back as initial data.
    let first = dir.path().join("first");
    let out = gns(&["solve", "--preset", "taylor-green", "--out", first.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    fs::copy(first.join("fields/u_0000.gnsf"), dir.path().join("a.gnsf")).unwrap();
    let cfg = r#"{
        "hypothesis": {"m": 1, "n": 2, "p": 2, "alpha": 1, "rho": 3},
        "grid": {"size": 64, "length": 25.132741228718345},
        "nodes": 32,
        "initial": {"kind": "file", "path": "a.gnsf", "scale": 0.5}
    }"#;
    fs::write(dir.path().join("run.json"), cfg).unwrap();
    let out_dir = dir.path().join("second");
    let out = gns(&[
        "solve", "--config", dir.path().join("run.json").to_str().unwrap(),
        "--out", out_dir.to_str().unwrap(), "--no-fields",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    fs::write(dir.path().join("bad.json"), r#"{"hypothesis": 1}"#).unwrap();
    let out = gns(&["solve", "--config", dir.path().join("bad.json").to_str().unwrap()]);
    assert_eq!(code(&out), 1);
}

#[test]
fn scaling_exit_codes() {
    let out = gns(&["scaling", "--set", "h0", "--preset", "single-mode", "--lambda", "1"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["initial_ratio"].as_f64().unwrap(), 1.0);

    let out = gns(&["scaling", "--set", "h0", "--preset", "single-mode", "--lambda", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["within_tolerance"], true);

    let out = gns(&["scaling", "--set", "h1", "--preset", "nyquist-mode", "--lambda", "2"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn norms_of_a_series() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    // The constant 1 on (0, 2]: ‖1‖_{L^{ρ,r}} = (ρ/r)^{1/r} T^{1/ρ}.
    fs::write(&path, "t,value\n0.5,1\n1,1\n2,1\n").unwrap();
    let out = gns(&["norms", "--series", path.to_str().unwrap(), "--rho", "4", "--r", "2"]);
    assert_eq!(code(&out), 0);
    let got = json(&out)["value"].as_f64().unwrap();
    let want = 2f64.sqrt() * 2f64.powf(0.25);
    assert!((got - want).abs() < 1e-12, "{got} vs {want}");

    let out = gns(&["norms", "--series", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
}
