use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qubit_cipher::codes::{load_code, meridian_code};
use qubit_cipher::CodeKind;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qubit-cipher")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = cli(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn code_gen_round_trips_through_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let file = path(dir.path(), "m.txt");
    ok(&["code", "gen", "--kind", "meridian", "--n", "16", "--out", &file]);
    let text = fs::read_to_string(&file).unwrap();
    assert!(text.starts_with("# qubit-code v1 n=16 kind=meridian\n"));
    let code = load_code(Path::new(&file)).unwrap();
    assert_eq!(code.kind(), CodeKind::Meridian);
    assert_eq!(code.states(), meridian_code(16).unwrap().states());
}

#[test]
fn bounds_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let file = path(dir.path(), "b.csv");
    ok(&["bounds", "--c-min", "0", "--c-max", "2", "--step", "0.5", "--out", &file]);
    let text = fs::read_to_string(&file).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "c,classical_p,quantum_p");
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[3], "1,0.75,0.75");
    assert_eq!(lines[5], "2,1,0.875");
}

#[test]
fn adversary_and_simulate_report_csv() {
    let dir = tempfile::tempdir().unwrap();
    let file = path(dir.path(), "f.txt");
    ok(&["code", "gen", "--kind", "fibonacci", "--n", "8", "--out", &file]);
    for method in ["greedy", "iterate", "brute"] {
        let out = ok(&["adversary", "--code", &file, "--c", "1", "--method", method, "--seed", "2"]);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "method,c,n,p,axis_x,axis_y,axis_z");
        let fields: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(fields[..3], [method, "1", "8"]);
        let p: f64 = fields[3].parse().unwrap();
        assert!(p > 0.5 && p <= 1.0);
    }
    let out = ok(&["simulate", "--code", &file, "--c", "1", "--trials", "5000", "--seed", "4"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "trials,eve_correct,estimated_p,std_error");
    assert!(lines[1].starts_with("5000,"));
}

#[test]
fn converge_writes_slope_trailer() {
    let dir = tempfile::tempdir().unwrap();
    let file = path(dir.path(), "c.csv");
    ok(&[
        "converge",
        "--c",
        "1",
        "--n",
        "64,16",
        "--kind",
        "fibonacci",
        "--restarts",
        "4",
        "--seed",
        "1",
        "--out",
        &file,
    ]);
    let text = fs::read_to_string(&file).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("16,"));
    assert!(text.lines().last().unwrap().starts_with("# slope="));
}

#[test]
fn failures_exit_nonzero_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let bad = path(dir.path(), "bad.txt");
    fs::write(&bad, "# qubit-code v1 n=2 kind=custom\n0,0,0,1\n1,0,0,0.5\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["adversary", "--code", &bad, "--c", "1", "--method", "iterate"],
        vec!["code", "gen", "--kind", "meridian", "--n", "15", "--out", &bad],
        vec!["code", "check", "--in", "/nonexistent/code.txt"],
        vec!["bounds", "--c-min", "1", "--c-max", "0", "--step", "0.1", "--out", &bad],
    ];
    for args in cases {
        let out = cli(&args);
        assert!(!out.status.success(), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"), "{args:?}");
    }
}
