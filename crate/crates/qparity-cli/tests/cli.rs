//! End-to-end runs of the binary: flag handling, file outputs, exit codes,
//! and byte determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qparity(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qparity"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

#[test]
fn series_sparse_fixtures() {
    let out = qparity(&["series", "--t", "1", "--n", "19", "--format", "sparse"]);
    assert!(out.status.success());
    assert_eq!(
        stdout_of(&out),
        "{\"trunc_degree\":19,\"exponents\":[0,1,3,4,5,6,7,12,13,14,16,17,18]}\n"
    );
    let out = qparity(&["series", "--t", "2", "--n", "4"]);
    assert_eq!(
        stdout_of(&out),
        "{\"trunc_degree\":4,\"exponents\":[0,2]}\n"
    );
    let out = qparity(&["series", "--t", "1", "--n", "0"]);
    assert_eq!(stdout_of(&out), "{\"trunc_degree\":0,\"exponents\":[0]}\n");
}

#[test]
fn series_hex_and_json_round_trip() {
    let out = qparity(&["series", "--t", "1", "--n", "19", "--format", "hex"]);
    let hex: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    // bits {0,1,3,4,5,6,7,12,13,14,16,17,18} -> bytes fb 70 07
    assert_eq!(hex["hex"], "fb70070000000000");
    let out = qparity(&["series", "--t", "1", "--n", "19", "--format", "json"]);
    let full: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(full["t"], 1);
    assert_eq!(full["hex"], hex["hex"]);
    assert_eq!(full["exponents"][2], 3);
}

#[test]
fn series_output_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("one.json");
    let p2 = dir.path().join("two.json");
    for (p, _) in [(&p1, 0), (&p2, 1)] {
        let out = qparity(&[
            "series",
            "--t",
            "9",
            "--n",
            "5000",
            "--format",
            "hex",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
}

#[test]
fn identity_solves_and_records() {
    let out = qparity(&["identity", "--a", "1", "--t", "3"]);
    assert!(out.status.success());
    let rec: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(rec["status"], "unique");
    assert_eq!(rec["epsilons"].as_array().unwrap().len(), 1);

    let out = qparity(&["identity", "--a", "5", "--t", "1", "--verify", "2000"]);
    assert!(out.status.success());
    let rec: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(rec["b"], 4);
    assert_eq!(rec["k"], 1);
    assert_eq!(rec["verify_degree"], 2000);
}

#[test]
fn identity_rejects_bad_hypotheses_with_exit_1() {
    let out = qparity(&["identity", "--a", "3", "--t", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = qparity(&["identity", "--a", "4", "--t", "1"]);
    assert_eq!(out.status.code(), Some(1));
    // missing required argument is also an invalid-parameters failure
    let out = qparity(&["identity", "--a", "5"]);
    assert_eq!(out.status.code(), Some(1));
    let out = qparity(&[
        "identity", "--a", "5", "--t", "1", "--fit", "200", "--verify", "100",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn identity_check_accepts_fixture_and_rejects_tamper() {
    let out = qparity(&[
        "identity",
        "--check",
        fixture("identity_a5_t3.json").to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let text = std::fs::read_to_string(fixture("identity_a5_t3.json")).unwrap();
    let mut rec: serde_json::Value = serde_json::from_str(&text).unwrap();
    rec["epsilons"][1]["value"] = serde_json::json!(0);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("tampered.json");
    std::fs::write(&bad, serde_json::to_string(&rec).unwrap()).unwrap();
    let out = qparity(&["identity", "--check", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn identity_env_overrides_degrees() {
    let out = Command::new(env!("CARGO_BIN_EXE_qparity"))
        .args(["identity", "--a", "5", "--t", "1"])
        .env("QPARITY_VERIFY_DEGREE", "1500")
        .output()
        .unwrap();
    assert!(out.status.success());
    let rec: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(rec["verify_degree"], 1500);

    let out = Command::new(env!("CARGO_BIN_EXE_qparity"))
        .args(["identity", "--a", "5", "--t", "1"])
        .env("QPARITY_VERIFY_DEGREE", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn density_csv_rows() {
    let out = qparity(&["density", "--t", "1", "--x", "19"]);
    assert_eq!(
        stdout_of(&out),
        "t,x,odd_count,ratio_decimal,path\n\
         1,19,13,0.6500000000,recurrence\n\
         1,19,13,0.6500000000,inversion\n"
    );
    let out = qparity(&["density", "--t", "2", "--x", "1"]);
    assert!(stdout_of(&out).contains("2,1,1,0.5000000000,product"));
}

#[test]
fn density_sweep_is_deterministic_across_worker_counts() {
    let args = [
        "density",
        "--t",
        "1",
        "--t",
        "3",
        "--t",
        "9",
        "--x",
        "4000",
        "--checkpoints",
        "100,1000",
    ];
    let one = qparity(&[&args[..], &["--workers", "1"][..]].concat());
    let four = qparity(&[&args[..], &["--workers", "4"][..]].concat());
    assert!(one.status.success());
    assert_eq!(stdout_of(&one), stdout_of(&four));
    // rows grouped by t in argument order, default route before inversion
    let body = stdout_of(&one);
    let first_data_line = body.lines().nth(1).unwrap();
    assert!(first_data_line.starts_with("1,100,"));
    assert!(body.lines().last().unwrap().starts_with("9,4000,"));
}

#[test]
fn certificate_build_and_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert35.json");
    let out = qparity(&[
        "certificate",
        "--a",
        "35",
        "--verify",
        "2000",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let cert: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(cert["status"], "complete");
    assert_eq!(cert["root"], 35);

    let out = qparity(&["certificate", "--check", path.to_str().unwrap()]);
    assert!(out.status.success());

    let mut bad = cert.clone();
    bad["identities"][0]["epsilons"][0]["value"] = serde_json::json!(0);
    let bad_path = dir.path().join("bad.json");
    std::fs::write(&bad_path, serde_json::to_string(&bad).unwrap()).unwrap();
    let out = qparity(&["certificate", "--check", bad_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn certificate_even_root_records_two_exponent() {
    let out = qparity(&["certificate", "--a", "20"]);
    assert!(out.status.success());
    let cert: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(cert["odd_part"], 5);
    assert_eq!(cert["two_exponent"], 2);
    assert_eq!(cert["steps"].as_array().unwrap().len(), 0);
}

#[test]
fn io_failure_exits_3() {
    let out = qparity(&[
        "series",
        "--t",
        "1",
        "--n",
        "5",
        "--out",
        "/nonexistent-dir/x.json",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let out = qparity(&["identity", "--check", "/nonexistent-dir/x.json"]);
    assert_eq!(out.status.code(), Some(3));
}
