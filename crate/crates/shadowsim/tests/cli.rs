use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn shadowsim(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_shadowsim"));
    cmd.args(args).env_remove("SHADOWSIM_DENSE_CUTOFF");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

/// Writes `problem` and runs it; returns (exit code, report, series rows).
fn run(problem: &str, extra: &[&str]) -> (i32, Value, Vec<(f64, String, f64, f64)>) {
    run_env(problem, extra, &[])
}

fn run_env(problem: &str, extra: &[&str], env: &[(&str, &str)]) -> (i32, Value, Vec<(f64, String, f64, f64)>) {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("problem.json");
    fs::write(&input, problem).unwrap();
    let out = dir.path().join("out");
    let mut args = vec!["run", "--input", input.to_str().unwrap(), "--output-dir", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = shadowsim(&args, env);
    let code = o.status.code().unwrap();
    let report: Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    (code, report, series(&out.join("series.csv")))
}

fn series(path: &Path) -> Vec<(f64, String, f64, f64)> {
    let mut r = csv::Reader::from_path(path).unwrap();
    assert_eq!(r.headers().unwrap(), vec!["time", "label", "re", "im"]);
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            (rec[0].parse().unwrap(), rec[1].to_string(), rec[2].parse().unwrap(), rec[3].parse().unwrap())
        })
        .collect()
}

const FERMION_VACUUM: &str = r#"{"fermion": {
  "n": 2,
  "gamma": [[1, 2, 0, 0.5], [2, 1, 0, -0.5], [3, 4, 0, 0.25], [4, 3, 0, -0.25]],
  "initial": "vacuum"
}}"#;

#[test]
fn fermion_vacuum_verifies() {
    let (code, report, rows) = run(FERMION_VACUUM, &["--times", "0:2:0.5", "--verify"]);
    assert_eq!(code, 0, "{report}");
    assert_eq!(report["status"], "ok");
    assert!(report["verify"]["max_error"].as_f64().unwrap() <= 1e-8);
    assert_eq!(report["verify"]["points"].as_array().unwrap().len(), 5);
    assert_eq!(report["normA"].as_f64().unwrap(), 2.0);
    assert!(report["sparsity"].as_u64().unwrap() <= report["bounds"]["sparsity_bound"].as_u64().unwrap());
    assert_eq!(rows.len(), 5 * 6);
    assert_eq!(rows[0].1, "c1c2");
}

#[test]
fn fermion_product_state_with_subset_energy() {
    let problem = r#"{"fermion": {"n": 3,
        "gamma": [[1, 3, 0, 0.4], [3, 1, 0, -0.4], [2, 5, 0, -0.7], [5, 2, 0, 0.7], [4, 6, 0, 0.2], [6, 4, 0, -0.2]],
        "initial": {"product": [1, 3]}, "times": [0, 0.5, 3], "subsets": [[1, 2, 3, 5]]}}"#;
    let (code, report, rows) = run(problem, &["--verify"]);
    assert_eq!(code, 0, "{report}");
    let energies: Vec<_> = rows.iter().filter(|r| r.1 == "energy {1,2,3,5}").collect();
    assert_eq!(energies.len(), 3);
    assert!(energies.iter().all(|r| r.3 == 0.0));
}

#[test]
fn commuting_qubit_hamiltonian_gives_constant_series() {
    let problem = r#"{"qubit": {"n": 3, "hamiltonian": [["Z1", 1], ["Z2", 1], ["Z3", 1]], "initial": "zero"}}"#;
    let (code, report, rows) = run(problem, &["--times", "0,0.5,1,7.5"]);
    assert_eq!(code, 0, "{report}");
    let per_time = 10;
    assert_eq!(rows.len(), 4 * per_time);
    for (k, row) in rows.iter().enumerate() {
        let first = &rows[k % per_time];
        assert_eq!(row.1, first.1);
        assert!((row.2 - first.2).abs() <= 1e-12 && (row.3 - first.3).abs() <= 1e-12, "{row:?}");
    }
    assert_eq!(report["normA"].as_f64().unwrap(), 4.0);
}

#[test]
fn qubit_with_explicit_state_verifies() {
    let problem = r#"{"qubit": {"n": 2, "hamiltonian": [["X1", 0.7], ["Y2", -0.3], ["Z2", 0.5]],
        "initial": {"amplitudes": [[1, 0], [0, 1], [0.5, 0], [0, -0.2]]}, "times": [0, 1, 4]}}"#;
    let (code, report, _) = run(problem, &["--verify"]);
    assert_eq!(code, 0, "{report}");
}

#[test]
fn quartic_term_is_refused_with_leakage() {
    let problem = r#"{"fermion": {"n": 3,
        "gamma": [[1, 2, 0, 0.5], [2, 1, 0, -0.5]], "initial": "vacuum",
        "quartic": [[1, 2, 3, 4, 0.8]], "times": [0, 1]}}"#;
    let (code, report, rows) = run(problem, &[]);
    assert_eq!(code, 3);
    assert_eq!(report["status"], "refused");
    assert!(report["leakage"].as_f64().unwrap() > 0.1);
    assert!(rows.is_empty());
}

#[test]
fn two_local_qubit_hamiltonian_is_refused() {
    let problem = r#"{"qubit": {"n": 2, "hamiltonian": [["Z1Z2", 1.0]], "initial": "zero"}}"#;
    let (code, report, _) = run(problem, &[]);
    assert_eq!(code, 3);
    assert!(report["leakage"].as_f64().unwrap() > 0.1);
}

#[test]
fn report_is_byte_identical_across_runs() {
    let problem = r#"{"boson": {"n": 3, "masses": [1, 2, 0.5],
        "springs": [[1, 2, 0.8], [2, 3, 1.3], [1, 1, 0.4]],
        "initial": {"q": [0.3, -0.2, 0.1], "p": [0, 0.5, -0.4]},
        "quadratic": true, "subsets": [[1, 2], [4, 5, 6]]}}"#;
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("p.json");
    fs::write(&input, problem).unwrap();
    let mut reports = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("o{k}"));
        let o = shadowsim(
            &["run", "--input", input.to_str().unwrap(), "--output-dir", out.to_str().unwrap(), "--times", "0:3:1", "--shots", "500", "--seed", "42", "--verify"],
            &[],
        );
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        reports.push((fs::read(out.join("report.json")).unwrap(), fs::read(out.join("series.csv")).unwrap()));
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn boson_energies_match_classical_values() {
    let problem = r#"{"boson": {"n": 1, "masses": [2], "springs": [[1, 1, 0.5]],
        "initial": {"q": [1], "p": [0]}, "quadratic": true, "subsets": [[1, 2]], "times": [0, 1.3, 5]}}"#;
    let (code, report, rows) = run(problem, &["--verify"]);
    assert_eq!(code, 0, "{report}");
    // E = κq²/2 = 0.25 and normA = 2E
    assert!((report["normA"].as_f64().unwrap() - 0.5).abs() <= 1e-12);
    for r in rows.iter().filter(|r| r.1 == "energy {1,2}") {
        assert!((r.2 - 0.25).abs() <= 1e-10, "{r:?}");
    }
}

#[test]
fn schema_errors_exit_one_with_location() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("bad.json");
    fs::write(&input, "{\"fermion\": {\n \"n\": \"two\"}}").unwrap();
    let out = dir.path().join("out");
    let o = shadowsim(&["run", "--input", input.to_str().unwrap(), "--output-dir", out.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("line 2"), "{stderr}");

    let (code, report, _) = run(r#"{"fermion": {"n": 2, "gamma": [[1, 9, 0, 1]], "initial": "vacuum"}}"#, &[]);
    assert_eq!(code, 1);
    assert!(report["error"].as_str().unwrap().contains("gamma"));
    fs::write(&input, FERMION_VACUUM).unwrap();
    let o = shadowsim(&["run", "--input", input.to_str().unwrap(), "--output-dir", out.to_str().unwrap(), "--times", "1,0"], &[]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn refusal_paths_have_distinct_codes() {
    // all-zero phase point: every expectation vanishes
    let degenerate = r#"{"boson": {"n": 1, "masses": [1], "springs": [[1, 1, 1]], "initial": {"q": [0], "p": [0]}}}"#;
    assert_eq!(run(degenerate, &[]).0, 5);
    // real off-diagonal Γ gives a non-Hermitian H
    let non_hermitian = r#"{"fermion": {"n": 2, "gamma": [[1, 2, 0.5, 0]], "initial": "vacuum"}}"#;
    assert_eq!(run(non_hermitian, &[]).0, 4);
    let (code, report, _) = run_env(FERMION_VACUUM, &["--verify"], &[("SHADOWSIM_DENSE_CUTOFF", "2")]);
    assert_eq!(code, 6, "{report}");
    // an impossible verification threshold
    let boson = r#"{"boson": {"n": 2, "masses": [1, 1.5], "springs": [[1, 2, 0.7], [1, 1, 0.3]],
        "initial": {"q": [0.4, 0], "p": [0, 0.3]}, "times": [3.7]}}"#;
    assert_eq!(run(boson, &["--verify", "--verify-tol", "1e-300"]).0, 2);
}

#[test]
fn heisenberg_circuit_and_continuous() {
    let circuit = r#"{"heisenberg": {"n": 2, "operator": {"pauli": "X1"},
        "circuit": {"gates": [{"name": "H", "qubits": [1]}, {"name": "CNOT", "qubits": [2, 1]}]}}}"#;
    let (code, report, rows) = run(circuit, &["--verify"]);
    assert_eq!(code, 0, "{report}");
    assert_eq!(rows.len(), 1);
    assert_eq!(report["details"]["terms"].as_f64().unwrap(), 1.0);

    let continuous = r#"{"heisenberg": {"n": 2, "operator": {"terms": [["X1", 1, 0], ["Z2", 0.5, 0]]},
        "hamiltonian": [["Z1", 0.8], ["X2", -0.4]], "times": [0, 0.5, 2]}}"#;
    let (code, report, rows) = run(continuous, &["--verify"]);
    assert_eq!(code, 0, "{report}");
    assert_eq!(rows.len(), 3 * 7);

    let outside = r#"{"heisenberg": {"n": 2, "operator": {"pauli": "X1X2"}, "hamiltonian": [["Z1", 1]]}}"#;
    assert_eq!(run(outside, &[]).0, 3);
}

#[test]
fn correlator_grid_verifies() {
    let problem = r#"{"correlator": {"times": [0, 0.7, 1.5],
        "system": {"fermion": {"n": 3,
                   "gamma": [[1, 4, 0, 0.3], [4, 1, 0, -0.3], [2, 6, 0, 0.9], [6, 2, 0, -0.9]],
                   "initial": {"product": [2]}}}}}"#;
    let (code, report, rows) = run(problem, &["--verify"]);
    assert_eq!(code, 0, "{report}");
    assert_eq!(rows.len(), 9 * 15 * 15);
    let qubit = r#"{"correlator": {"times": [0, 1],
        "system": {"qubit": {"n": 2, "hamiltonian": [["X1", 0.3], ["Z2", 1.1]], "initial": "zero"}}}}"#;
    assert_eq!(run(qubit, &["--verify"]).0, 0);
}

#[test]
fn verify_subcommand_detects_perturbation() {
    let ok = shadowsim(&["verify", "--only", "4"], &[]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).starts_with("PASS  4"));
    let bad = shadowsim(&["verify", "--only", "4", "--perturb", "4"], &[]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stdout).starts_with("FAIL  4"));
    let other = shadowsim(&["verify", "--only", "9", "--perturb", "4"], &[]);
    assert_eq!(other.status.code(), Some(0));
}
