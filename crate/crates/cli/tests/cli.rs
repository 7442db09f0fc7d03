//! End-to-end checks of the binary: round trips, determinism, exit codes.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn pert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pert"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn pert_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_pert"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn sample_then_check_reports_member() {
    let sample = pert(&["sample", "--algebra", r#"[{"field":"C","n":2}]"#, "--seed", "7"]);
    assert!(sample.status.success());
    let check = pert_stdin(&["check", "-"], &stdout(&sample));
    assert!(check.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&check)).unwrap();
    assert_eq!(value["member"], serde_json::json!(true));
}

#[test]
fn mul_of_samples_passes_check() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (path, seed) in [(&a, "1"), (&b, "2")] {
        let out = pert(&["sample", "--algebra", r#"[{"field":"H","n":1}]"#, "--seed", seed]);
        std::fs::write(path, stdout(&out)).unwrap();
    }
    let prod = pert(&["mul", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert!(prod.status.success());
    let check = pert_stdin(&["check", "-"], &stdout(&prod));
    let value: serde_json::Value = serde_json::from_str(&stdout(&check)).unwrap();
    assert_eq!(value["member"], serde_json::json!(true));
}

#[test]
fn identical_seeds_give_identical_bytes() {
    let args = ["sample", "--algebra", r#"[{"field":"H","n":2}]"#, "--seed", "11"];
    let first = pert(&args);
    let second = pert(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);

    let emb = ["embed", "--field", "R", "--n", "3", "--seed", "5"];
    assert_eq!(pert(&emb).stdout, pert(&emb).stdout);
}

#[test]
fn spec_table_single_block_shape() {
    let out = pert(&["spec-table", "--algebra", r#"[{"field":"C","n":3}]"#]);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["V"], serde_json::json!(8));
    assert_eq!(value["S"], serde_json::json!(64));
    assert_eq!(value["total"], serde_json::json!(72));
}

#[test]
fn check_identity_element_from_stdin() {
    let identity = r#"{
        "v": 1,
        "algebra": [{"field": "C", "n": 2}],
        "terms": [{
            "a": [[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[1.0,0.0]]],
            "b": [[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[1.0,0.0]]]
        }]
    }"#;
    let out = pert_stdin(&["check", "-"], identity);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["member"], serde_json::json!(true));
    assert_eq!(value["residual"], serde_json::json!(0.0));
}

#[test]
fn exit_codes() {
    // malformed json -> 1
    let out = pert_stdin(&["check", "-"], "not json");
    assert_eq!(out.status.code(), Some(1));

    // schema version mismatch -> 1
    let out = pert_stdin(&["check", "-"], r#"{"v": 2, "algebra": [], "terms": []}"#);
    assert_eq!(out.status.code(), Some(1));

    // non-member into fluctuate -> 2
    let dir = tempfile::tempdir().unwrap();
    let dirac = dir.path().join("d.json");
    std::fs::write(
        &dirac,
        r#"{"dim":2,"mat":[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[-1.0,0.0]]]}"#,
    )
    .unwrap();
    let bad = r#"{"algebra":[{"field":"C","n":2}],
        "terms":[{"a":[[[2.0,0.0],[0.0,0.0]],[[0.0,0.0],[2.0,0.0]]],
                  "b":[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[1.0,0.0]]]}]}"#;
    let out = pert_stdin(&["fluctuate", "-", "--dirac", dirac.to_str().unwrap()], bad);
    assert_eq!(out.status.code(), Some(2));

    // same element with --force runs
    let out = pert_stdin(
        &["fluctuate", "-", "--dirac", dirac.to_str().unwrap(), "--force"],
        bad,
    );
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn oracle_dims_default_table_matches() {
    let out = pert(&["oracle-dims"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for row in value["table"].as_array().unwrap() {
        assert_eq!(row["match"], serde_json::json!(true), "{row}");
    }
}

#[test]
fn canon_on_embedded_diagonal_unitary() {
    // embed diag(1, i): canonical form has first column e1 and first row
    // (1, 0, 0, 0) since unitaries embed block-diagonally
    let dir = tempfile::tempdir().unwrap();
    let ufile = dir.path().join("u.json");
    std::fs::write(
        &ufile,
        r#"{"mat":[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[0.0,1.0]]]}"#,
    )
    .unwrap();
    let emb = pert(&["embed", "--field", "C", "--n", "2", "--unitary", ufile.to_str().unwrap()]);
    assert!(emb.status.success());
    let canon = pert_stdin(&["canon", "-"], &stdout(&emb));
    assert!(canon.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&canon)).unwrap();
    assert_eq!(value["case"], serde_json::json!("C"));
    let a = value["a_canonical"].as_array().unwrap();
    // first column e1
    for (i, row) in a.iter().enumerate() {
        let z = row.as_array().unwrap()[0].as_array().unwrap();
        let want = if i == 0 { 1.0 } else { 0.0 };
        assert!((z[0].as_f64().unwrap() - want).abs() < 1e-12);
        assert!(z[1].as_f64().unwrap().abs() < 1e-12);
    }
    // v row vanishes for unitary embeddings
    let v = value["blocks"]["v"].as_array().unwrap();
    for z in v {
        let z = z.as_array().unwrap();
        assert!(z[0].as_f64().unwrap().abs() < 1e-12);
        assert!(z[1].as_f64().unwrap().abs() < 1e-12);
    }
}
