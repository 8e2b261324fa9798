use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tcforge_core::synthesis::f_gate;
use tcforge_core::{apply_circuit, distance_up_to_phase, vacuum_sandwich, CMat, Circuit, Complex64};

fn tcforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tcforge")).args(args).output().unwrap()
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let out = tcforge(args);
    let code = out.status.code().unwrap();
    let v = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", String::from_utf8_lossy(&out.stderr)));
    (code, v)
}

fn write_circuit(dir: &Path, name: &str, c: &Circuit) -> String {
    let p = dir.join(name);
    std::fs::write(&p, c.to_json()).unwrap();
    p.to_str().unwrap().to_owned()
}

fn amp(v: &Value, qubits: &str, k: u64) -> Complex64 {
    v["output"]
        .as_array()
        .unwrap()
        .iter()
        .find(|a| a["qubits"] == qubits && a["k"] == k)
        .map(|a| Complex64::new(a["re"].as_f64().unwrap(), a["im"].as_f64().unwrap()))
        .unwrap_or_default()
}

#[test]
fn synthesize_cz_reports_published_time() {
    let (code, v) = run_json(&["synthesize", "--gate", "cz"]);
    assert_eq!(code, 0);
    assert!((v["tau"].as_f64().unwrap() - 2.866).abs() < 0.01);
    assert!(v["distance"].as_f64().unwrap() < 1e-8);
    assert_eq!(v["pass"], true);
}

#[test]
fn synthesize_zero_phases_is_empty() {
    let (code, v) = run_json(&["synthesize", "--phases", "0,0,0"]);
    assert_eq!(code, 0);
    assert_eq!(v["tau"].as_f64().unwrap(), 0.0);
    assert_eq!(v["circuit"]["gates"].as_array().unwrap().len(), 0);
}

#[test]
fn synthesize_uzz_matches_direct_exponential() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("uzz.json");
    let out = tcforge(&["synthesize", "--gate", "uzz", "--phi", "0.7", "--circuit", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let circ = Circuit::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    // exp(−iφ Z⊗Z): Z⊗Z = diag(1, −1, −1, 1).
    let phi = 0.7f64;
    let zz = [1.0, -1.0, -1.0, 1.0];
    let oracle = CMat::from_fn(4, 4, |r, c| if r == c { Complex64::from_polar(1.0, -phi * zz[r]) } else { Complex64::default() });
    let sandwich = vacuum_sandwich(&apply_circuit(&circ, 2).unwrap()).unwrap();
    assert!(distance_up_to_phase(&sandwich.operator, &oracle).unwrap() < 1e-8);
}

#[test]
fn unreachable_tolerance_is_a_verification_failure() {
    let (code, v) = run_json(&["synthesize", "--gate", "swap", "--tol", "1e-30"]);
    assert_eq!(code, 2);
    assert_eq!(v["pass"], false);
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["synthesize", "--gate", "toffoli"][..],
        &["synthesize", "--gate", "uzz"],
        &["synthesize", "--phases", "1,2"],
        &["synthesize", "--gate", "cz", "--n", "3"],
        &["synthesize", "--gate", "cz", "--tol", "0"],
        &["verify", "lie", "--n", "7"],
        &["verify", "accidental", "--qmax", "13"],
        &["verify", "schwinger", "--n", "13"],
        &["sectors", "--n", "2"],
        &["no-such-command"],
    ] {
        assert_eq!(tcforge(args).status.code(), Some(1), "{args:?}");
    }
    let out = Command::new(env!("CARGO_BIN_EXE_tcforge"))
        .args(["sectors", "--n", "2", "--qmax", "1"])
        .env("TCFORGE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn simulate_f_gate_moves_two_excitations() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_circuit(dir.path(), "f.json", &f_gate());
    let (code, v) = run_json(&["simulate", &f, "--state", "00"]);
    assert_eq!(code, 0);
    assert!((amp(&v, "11", 2).norm() - 1.0).abs() < 1e-9);
    assert!((v["vacuum_residual"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((v["interaction_time"].as_f64().unwrap() - 3.0 / (2.0 * 6f64.sqrt())).abs() < 1e-15);
}

#[test]
fn simulate_empty_circuit_echoes_input() {
    let dir = tempfile::tempdir().unwrap();
    let e = write_circuit(dir.path(), "empty.json", &Circuit::new(2));
    let (code, v) = run_json(&["simulate", &e, "--state", "psi-"]);
    assert_eq!(code, 0);
    let (inp, out) = (v["input"].as_array().unwrap(), v["output"].as_array().unwrap());
    assert_eq!(inp.len(), out.len());
    for (a, b) in inp.iter().zip(out) {
        assert_eq!((&a["qubits"], &a["k"]), (&b["qubits"], &b["k"]));
        assert!((a["re"].as_f64().unwrap() - b["re"].as_f64().unwrap()).abs() < 1e-12);
        assert!(b["im"].as_f64().unwrap().abs() < 1e-12);
    }
    assert_eq!(v["interaction_time"].as_f64().unwrap(), 0.0);
    assert!(v["vacuum_residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn simulate_f_rz_f_entangles_with_oscillator() {
    let dir = tempfile::tempdir().unwrap();
    let c = f_gate().rz(0.9).then(&f_gate());
    let p = write_circuit(dir.path(), "frf.json", &c);
    let (code, v) = run_json(&["simulate", &p, "--state", "psi+"]);
    assert_eq!(code, 0);
    assert!(v["vacuum_residual"].as_f64().unwrap() > 1e-3);
    assert!((v["norm"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn simulate_unitary_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_circuit(dir.path(), "tc.json", &Circuit::new(2).tc(0.4).rz(0.3));
    let (code, v) = run_json(&["simulate", &p, "--unitary", "--qmax", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["backend"], "ChargeSector");
    // (n=2, q≤3): one j=0 sector per q≥1, one j=1 sector per q.
    assert_eq!(v["blocks"].as_array().unwrap().len(), 7);
    assert!(v["max_unitarity_residual"].as_f64().unwrap() < 1e-12);
    let rx = write_circuit(dir.path(), "rx.json", &Circuit::new(2).rx(0.3).tc(0.4));
    let (_, v) = run_json(&["simulate", &rx, "--unitary", "--qmax", "3"]);
    assert_eq!(v["backend"], "JTower");
}

#[test]
fn simulate_rejects_malformed_json() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\"n\": 2, \"gates\": [").unwrap();
    assert_eq!(tcforge(&["simulate", p.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(tcforge(&["simulate", "/nonexistent/circuit.json"]).status.code(), Some(1));
}

#[test]
fn verify_accidental_at_desk_scale() {
    let (code, v) = run_json(&["verify", "accidental", "--n", "6", "--qmax", "12"]);
    assert_eq!(code, 0);
    assert_eq!(v["failures"], 0);
    let pairs = v["results"].as_array().unwrap().iter().filter(|c| c["metric"] == "htc-difference").count();
    assert!(pairs > 0);
}

#[test]
fn verify_lie_small() {
    let (code, v) = run_json(&["verify", "lie", "--n", "2", "--qmax", "4"]);
    assert_eq!(code, 0);
    for c in v["results"].as_array().unwrap().iter().filter(|c| c["metric"] == "rank") {
        assert_eq!(c["value"], c["expected"]);
    }
}

#[test]
fn verify_phases_distinguishes_cz_and_anti_cz() {
    let (code, v) = run_json(&["verify", "phases", "--n", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["details"]["cz"]["realizable"], false);
    assert_eq!(v["details"]["anti_cz"]["realizable"], true);
    let (code, _) = run_json(&["verify", "phases", "--n", "8", "--override-scale"]);
    assert_eq!(code, 0);
}

#[test]
fn verify_schwinger_and_realizability() {
    let (code, v) = run_json(&["verify", "schwinger", "--n", "8", "--qmax", "10"]);
    assert_eq!(code, 0);
    assert_eq!(v["pass"], true);
    let (code, v) = run_json(&["verify", "realizability", "--n", "3", "--qmax", "6", "--trials", "20"]);
    assert_eq!(code, 0);
    assert_eq!(v["checks"], 20);
}

#[test]
fn outputs_are_deterministic_across_thread_counts() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_tcforge"))
            .args(["verify", "lie", "--n", "3", "--qmax", "6"])
            .env("TCFORGE_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    let a = run("1");
    assert!(!a.is_empty());
    assert_eq!(a, run("4"));
    assert_eq!(a, run("1"));
}

#[test]
fn sectors_csv_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("sectors.csv");
    let out = tcforge(&["sectors", "--n", "2", "--qmax", "2", "--format", "csv", "--out", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&p).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "n,q,two_j,dim,h,filled,partner_q,partner_two_j");
    assert_eq!(lines.count(), 5);
}

#[test]
fn report_table_columns() {
    let out = tcforge(&["report", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("gate,tau,published,distance,kind\n"));
    let swap = text.lines().find(|l| l.starts_with("swap,")).unwrap();
    let tau: f64 = swap.split(',').nth(1).unwrap().parse().unwrap();
    assert!((tau - 1.273).abs() < 0.01);
}
