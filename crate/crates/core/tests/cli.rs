use std::path::Path;
use std::process::{Command, Output};

use rimc::mtx::write_matrix_market_file;
use rimc::sparse::SparseMatrix;
use rimc::Complex64 as C64;

fn rimc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rimc")).args(args).output().unwrap()
}

fn diag_file(dir: &Path, name: &str, d: &[f64]) -> String {
    let m = SparseMatrix::from_diagonal(&d.iter().map(|&v| C64::new(v, 0.0)).collect::<Vec<_>>());
    let path = dir.join(name);
    write_matrix_market_file(&path, &m).unwrap();
    path.to_str().unwrap().to_string()
}

fn json(out: &Output) -> serde_json::Value {
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn finds_diagonal_spectrum_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = diag_file(dir.path(), "a.mtx", &[1.0, 2.0, 3.0]);
    let v = json(&rimc(&["--matrix-a", &a, "--region", "0.5", "3.5", "-1.5", "1.5"]));
    let eig = v["eigenvalues"].as_array().unwrap();
    assert_eq!(eig.len(), 3);
    for (e, want) in eig.iter().zip([1.0, 2.0, 3.0]) {
        assert!((e["re"].as_f64().unwrap() - want).abs() <= 1e-9);
        assert!(e["im"].as_f64().unwrap().abs() <= 1e-9);
        assert_eq!(e["boundary"], false);
    }
    assert!(v["factorizations_built"].as_u64().unwrap() >= 1);
    assert!(v["node_solves"].as_u64().unwrap() > 0);
    assert!(v["regions_tested"].as_u64().unwrap() > 0);
    assert_eq!(v["config"]["d0"], 1e-9);
    assert!(v.get("wall_time").is_none());
}

#[test]
fn empty_square_gives_empty_list() {
    let dir = tempfile::tempdir().unwrap();
    let a = diag_file(dir.path(), "a.mtx", &[5.0, 6.0, -7.0]);
    let v = json(&rimc(&["--matrix-a", &a, "--region", "-1", "1", "-1", "1"]));
    assert_eq!(v["eigenvalues"].as_array().unwrap().len(), 0);
}

#[test]
fn generalized_pencil_with_singular_b() {
    let dir = tempfile::tempdir().unwrap();
    let a = diag_file(dir.path(), "a.mtx", &[2.0, 3.0, 1.0]);
    let b = diag_file(dir.path(), "b.mtx", &[1.0, 1.0, 0.0]);
    let v = json(&rimc(&["--matrix-a", &a, "--matrix-b", &b, "--region", "1.5", "3.5", "-1", "1"]));
    let re: Vec<f64> = v["eigenvalues"].as_array().unwrap().iter().map(|e| e["re"].as_f64().unwrap()).collect();
    assert_eq!(re.len(), 2);
    assert!((re[0] - 2.0).abs() <= 1e-9 && (re[1] - 3.0).abs() <= 1e-9);
}

#[test]
fn csv_output_to_file_and_region_dump() {
    let dir = tempfile::tempdir().unwrap();
    let a = diag_file(dir.path(), "a.mtx", &[1.0, 2.0]);
    let out_path = dir.path().join("out.csv");
    let dump = dir.path().join("regions.json");
    let out = rimc(&[
        "--matrix-a", &a, "--region", "0.5", "2.5", "-1", "1", "--format", "csv",
        "--output", out_path.to_str().unwrap(), "--dump-regions", dump.to_str().unwrap(),
        "--timing",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "re,im,box,indicator,boundary");
    assert_eq!(lines.len(), 3);
    let regions: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&dump).unwrap()).unwrap();
    let regions = regions.as_array().unwrap();
    assert!(regions.len() > 10);
    assert!(regions[0].get("half_side").is_some() && regions[0].get("admissible").is_some());
}

#[test]
fn timing_flag_adds_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    let a = diag_file(dir.path(), "a.mtx", &[1.0]);
    let v = json(&rimc(&["--matrix-a", &a, "--region", "0", "2", "-1", "1", "--timing"]));
    assert!(v["wall_time"].as_f64().unwrap() >= 0.0);
}

#[test]
fn usage_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let a = diag_file(dir.path(), "a.mtx", &[1.0]);
    assert_eq!(rimc(&["--matrix-a", &a, "--region", "1", "-1", "-1", "1"]).status.code(), Some(2));
    assert_eq!(rimc(&["--matrix-a", &a, "--region", "0", "1", "0"]).status.code(), Some(2));
    assert_eq!(rimc(&["--region", "0", "1", "0", "1"]).status.code(), Some(2));
    assert_eq!(
        rimc(&["--matrix-a", "/nonexistent.mtx", "--region", "0", "1", "0", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        rimc(&["--matrix-a", &a, "--region", "0", "1", "0", "1", "--indicator-threshold", "1.5"]).status.code(),
        Some(2)
    );
    let bad = dir.path().join("bad.mtx");
    std::fs::write(&bad, "%%MatrixMarket matrix array real general\n1 1\n1.0\n").unwrap();
    let out = rimc(&["--matrix-a", bad.to_str().unwrap(), "--region", "0", "1", "0", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn singular_pencil_is_a_solver_error() {
    // A = B = 0: A - zB is singular for every z
    let dir = tempfile::tempdir().unwrap();
    let zero = dir.path().join("zero.mtx");
    write_matrix_market_file(&zero, &SparseMatrix::zeros(2, 2)).unwrap();
    let z = zero.to_str().unwrap();
    let out = rimc(&["--matrix-a", z, "--matrix-b", z, "--region", "0", "1", "0", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("solver error"));
}
