use std::path::Path;
use std::process::{Command, Output};

fn knapsub(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_knapsub")).args(args).output().unwrap()
}

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn gen_then_solve() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    let p = path.to_str().unwrap();
    let gen = knapsub(&["gen", "coverage", "--sets", "5", "--items", "7", "--seed", "3", "--out", p]);
    assert_eq!(code(&gen), 0, "{}", String::from_utf8_lossy(&gen.stderr));
    let again = knapsub(&["gen", "coverage", "--sets", "5", "--items", "7", "--seed", "3"]);
    assert_eq!(std::fs::read(&path).unwrap(), again.stdout);

    for alg in ["randomized", "deterministic", "bruteforce"] {
        let out = knapsub(&["solve", p, "--algorithm", alg, "--h", "1"]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(doc["feasible"], true);
    }
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, std::fs::read_to_string(fixture("tiny_modular.json")).unwrap().replace("[[0.5, 0.3]]", "[[0.5]]"))
        .unwrap();
    let out = knapsub(&["solve", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("costs[0]"));
    assert_eq!(code(&knapsub(&["solve", "/definitely/missing.json"])), 2);
    assert_eq!(code(&knapsub(&["solve", &fixture("tiny_modular.json"), "--solver", "nope"])), 2);
    assert_eq!(code(&knapsub(&["solve", &fixture("tiny_modular.json"), "--epsilon", "0"])), 2);
    assert_eq!(code(&knapsub(&["frobnicate"])), 2);
}

#[test]
fn capacity_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    let gen = knapsub(&["gen", "modular", "--n", "30", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&gen), 0);
    assert_eq!(code(&knapsub(&["opt", path.to_str().unwrap()])), 3);
}

#[test]
fn opt_and_verify() {
    let out = knapsub(&["opt", &fixture("tiny_modular.json")]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["value"], 3);
    let out = knapsub(&["verify", &fixture("table3.json"), "--samples", "500"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("submodularity"));
}

#[test]
fn suite_writes_report_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("r.csv");
    let out = knapsub(&["suite", &fixture("golden_suite.json"), "--no-timing", "--out", out_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let golden = std::fs::read_to_string(fixture("golden_suite.csv")).unwrap();
    assert_eq!(std::fs::read_to_string(&out_path).unwrap(), golden);
    let summary = std::fs::read_to_string(Path::new(&format!("{}.summary.csv", out_path.display()))).unwrap();
    assert!(summary.starts_with("algorithm,solver,rows,errors,with_opt,mean_ratio,min_ratio\n"));
    assert_eq!(summary.lines().count(), 5);
}
