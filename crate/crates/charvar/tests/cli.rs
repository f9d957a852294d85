//! End-to-end checks of the `charvar` binary: exit codes, output formats,
//! determinism, and the atomic `--output` path.

use std::path::Path;
use std::process::{Command, Output};

use charvar::matrixrep::{haar_unitary, MatrixRep, Target, DEFAULT_TOL};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn charvar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_charvar"))
        .args(args)
        .env_remove("CHARVAR_TOL")
        .output()
        .expect("spawn charvar")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

#[test]
fn analyze_exit_codes() {
    // All hypotheses hold: compact surface group into U(3).
    let ok = charvar(&["analyze", "--group", "surface 2", "--target", "U 3"]);
    assert_eq!(ok.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&ok.stderr));

    // PSU(2) has torsion in pi1, so the covering hypothesis fails.
    let gated = charvar(&["analyze", "--group", "free 2", "--target", "PSU 2"]);
    assert_eq!(gated.status.code(), Some(2));
    let text = stdout_of(&gated);
    assert!(text.contains("Example 3.11"), "missing counterexample citation:\n{text}");

    // Unparseable target is a hard error.
    let bad = charvar(&["analyze", "--group", "free 2", "--target", "Q 17"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&bad.stderr).is_empty());
}

#[test]
fn json_output_is_valid_and_deterministic() {
    let args = ["analyze", "--group", "free_abelian 3", "--target", "SU 4", "--format", "json"];
    let a = charvar(&args);
    assert_eq!(a.status.code(), Some(0));
    let text = stdout_of(&a);
    let value: serde_json::Value = serde_json::from_str(&text).expect("valid JSON");
    assert_eq!(value["group"], "SU 4");
    assert!(value["pi1_moduli"].is_object());

    // Same invocation, byte-identical output.
    let b = charvar(&args);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn output_flag_writes_same_bytes_as_stdout() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("report.json");
    let args = ["lie", "info", "PGL 3", "--format", "json"];
    let on_stdout = charvar(&args);
    assert_eq!(on_stdout.status.code(), Some(0));

    let mut with_output: Vec<&str> = args.to_vec();
    let path_str = path.to_str().unwrap();
    with_output.extend_from_slice(&["--output", path_str]);
    let to_file = charvar(&with_output);
    assert_eq!(to_file.status.code(), Some(0));
    assert!(to_file.stdout.is_empty());

    let written = std::fs::read_to_string(&path).expect("read report");
    let streamed = stdout_of(&on_stdout);
    // The file version is not newline-terminated by the pager-friendly print.
    assert_eq!(written.trim_end(), streamed.trim_end());
}

#[test]
fn group_check_classifies_a_presentation_file() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("surface.grp");
    std::fs::write(
        &path,
        "gens a b c d;\nrel a b a^-1 b^-1 c d c^-1 d^-1;",
    )
    .expect("write presentation");
    let out = charvar(&["group", "check", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).expect("valid JSON");
    assert_eq!(value["detected_class"]["surface"]["genus"], 2);
    assert_eq!(value["exponent_canceling"], true);
}

fn write_commuting_pair(path: &Path, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = haar_unitary(3, &mut rng);
    let diag = |angles: [f64; 3]| {
        nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            3,
            angles.iter().map(|&t| nalgebra::Complex::new(0.0, t).exp()),
        ))
    };
    let a = &q * diag([0.3, 1.1, 2.0]) * q.adjoint();
    let b = &q * diag([0.7, -0.4, 1.5]) * q.adjoint();
    let rep = MatrixRep::new(
        Target::U(3),
        vec!["a".into(), "b".into()],
        vec![a, b],
        DEFAULT_TOL,
    )
    .expect("unitary by construction");
    std::fs::write(path, rep.to_json()).expect("write fixture");
}

#[test]
fn verify_check_and_lift_on_a_fixture() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("pair.json");
    write_commuting_pair(&path, 7);
    let input = path.to_str().unwrap();

    let check = charvar(&[
        "verify", "--mode", "check", "--group", "free_abelian 2", "--input", input,
        "--format", "json",
    ]);
    assert_eq!(check.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&check.stderr));
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&check)).expect("valid JSON");
    assert_eq!(value["passed"], true);

    let lift = charvar(&[
        "verify", "--mode", "lift", "--group", "free_abelian 2", "--input", input,
        "--format", "json",
    ]);
    assert_eq!(lift.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&lift.stderr));
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&lift)).expect("valid JSON");
    let round_trip = value["round_trip_residual"].as_f64().expect("round trip field");
    assert!(round_trip < 1e-10, "round trip residual {round_trip}");
    for pair in value["relator_residuals"].as_array().expect("residual array") {
        let residual = pair[0].as_f64().expect("residual entry");
        assert!(residual < 1e-8, "relator residual {residual}");
    }
}

#[test]
fn verify_sample_is_deterministic_per_seed() {
    let args = [
        "verify", "--mode", "sample", "--group", "free_abelian 2", "--target", "U 2",
        "--seed", "42", "--count", "20", "--format", "json",
    ];
    let a = charvar(&args);
    assert_eq!(a.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&a.stderr));
    let b = charvar(&args);
    assert_eq!(a.stdout, b.stdout);

    let mut other: Vec<&str> = args.to_vec();
    other[8] = "43";
    let c = charvar(&other);
    assert_eq!(c.status.code(), Some(0));
    assert_ne!(a.stdout, c.stdout, "different seeds should sample differently");
}
