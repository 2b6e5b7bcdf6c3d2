//! End-to-end checks of the command-line interface: flag surface, report
//! schemas, matrix export, and the exit-code contract.

use std::process::{Command, Output};

fn posmap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_posmap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn certify_n2_produces_a_supported_report() {
    let out = posmap(&["certify", "--n", "2", "--seed", "42", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["version"], "v1");
    assert_eq!(v["command"], "certify");
    assert_eq!(v["n"], 2);
    assert_eq!(v["seed"], 42);
    assert_eq!(v["results"]["strong_spanning_dim"]["measured"], 60);
    assert_eq!(v["results"]["strong_spanning_dim"]["target"], 60);
    assert_eq!(v["results"]["spanning_dim"]["measured"], 16);
    assert_eq!(v["results"]["commutant_dim"], 1);
    assert_eq!(v["results"]["exposedness_verdict"], "supported");
}

#[test]
fn dims_n3_reports_the_w_dimension() {
    let out = posmap(&["dims", "--n", "3", "--samples", "2000", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("192/192"), "table was:\n{text}");

    let out = posmap(&["dims", "--n", "3", "--samples", "2000", "--seed", "1", "--json"]);
    let v = stdout_json(&out);
    assert_eq!(v["results"]["measured"]["w"], 192);
    assert_eq!(v["results"]["targets"]["w"], 192);
    assert_eq!(v["results"]["verdicts"]["w"], "match");
}

#[test]
fn witness_writes_the_matrix_file() {
    let dir = std::env::temp_dir().join(format!("posmap-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("w2.json");
    let out = posmap(&["witness", "--n", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    let text = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["rows"], 16);
    assert_eq!(v["cols"], 16);
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 256);
    // Trace 1, real.
    let trace: f64 = (0..16)
        .map(|i| entries[i * 16 + i][0].as_f64().unwrap())
        .sum();
    assert!((trace - 1.0).abs() <= 1e-10);
    // Hermitian within 1e-12.
    for i in 0..16 {
        for j in 0..16 {
            let re_ij = entries[i * 16 + j][0].as_f64().unwrap();
            let im_ij = entries[i * 16 + j][1].as_f64().unwrap();
            let re_ji = entries[j * 16 + i][0].as_f64().unwrap();
            let im_ji = entries[j * 16 + i][1].as_f64().unwrap();
            assert!((re_ij - re_ji).abs() <= 1e-12);
            assert!((im_ij + im_ji).abs() <= 1e-12);
        }
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn kernel_reports_residuals() {
    let out = posmap(&["kernel", "--n", "2", "--seed", "5", "--samples", "6", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let pairs = v["results"]["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 6);
    for p in pairs {
        assert!(p["residual"].as_f64().unwrap() <= 1e-10);
        assert_eq!(p["x"].as_array().unwrap().len(), 4);
    }
}

#[test]
fn ppt_finds_a_violation_quickly_at_n2() {
    let out = posmap(&["ppt", "--n", "2", "--seed", "7", "--iterations", "5000", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["results"]["found"], true);
    assert!(v["results"]["witness_value"].as_f64().unwrap() < -1e-8);
    assert_eq!(v["results"]["state"]["rows"], 16);
}

#[test]
fn exit_code_contract() {
    // Usage errors.
    assert_eq!(posmap(&["bogus"]).status.code(), Some(64));
    assert_eq!(posmap(&["certify", "--n", "1"]).status.code(), Some(64));
    assert_eq!(
        posmap(&["certify", "--n", "2", "--restarts", "0"]).status.code(),
        Some(64)
    );
    // Help is not an error.
    assert_eq!(posmap(&["--help"]).status.code(), Some(0));

    // I/O failure.
    assert_eq!(
        posmap(&["witness", "--n", "2", "--out", "/nonexistent-dir/w.json"])
            .status
            .code(),
        Some(74)
    );

    // Under-sampling is inconclusive, not a failure.
    assert_eq!(
        posmap(&["dims", "--n", "2", "--samples", "8", "--seed", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        posmap(&["certify", "--n", "2", "--samples", "8", "--seed", "3"])
            .status
            .code(),
        Some(2)
    );

    // Synthetic invariant violation: a tolerance no residual can meet.
    assert_eq!(
        posmap(&["kernel", "--n", "2", "--seed", "5", "--tol", "1e-20"])
            .status
            .code(),
        Some(1)
    );
}
