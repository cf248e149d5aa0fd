use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn querylab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_querylab"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn workspace() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("and.pbf"), "n 2\ntable 0001\n").unwrap();
    fs::write(dir.path().join("partial.pbf"), "n 3\ntable 0001*111\n").unwrap();
    fs::write(
        dir.path().join("slice.pbf"),
        "n 4\npoint 1100 1\npoint 1010 0\npoint 1001 0\npoint 0110 1\npoint 0101 1\npoint 0011 0\n",
    )
    .unwrap();
    fs::write(
        dir.path().join("sat.cnf"),
        "c satisfiable\np cnf 3 2\n1 2 3 0\n-1 -2 -3 0\n",
    )
    .unwrap();
    let unsat: String = (0..8)
        .map(|m| {
            let lit = |i: i32| if m >> (i - 1) & 1 == 1 { -i } else { i };
            format!("{} {} {} 0\n", lit(1), lit(2), lit(3))
        })
        .collect();
    fs::write(dir.path().join("unsat.cnf"), format!("p cnf 3 8\n{unsat}")).unwrap();
    dir
}

#[test]
fn measures_reports_and_function() {
    let dir = workspace();
    let o = querylab(dir.path(), &["measures", "and.pbf", "--json"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["report"]["d"], 2);
    assert_eq!(v["report"]["bs"], 2);
    assert_eq!(v["report"]["c"], 2);
    let text = stdout(&querylab(dir.path(), &["measures", "partial.pbf"]));
    assert!(text.contains("D 3"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn adeg_writes_witness() {
    let dir = workspace();
    let o = querylab(dir.path(), &["adeg", "partial.pbf", "--out", "w.poly", "--json"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["degree"], 1);
    let poly = fs::read_to_string(dir.path().join("w.poly")).unwrap();
    assert!(poly.starts_with("n 3\nbasis monomial\n"));
}

#[test]
fn symmetric_matches_tree_search() {
    let dir = workspace();
    let o = querylab(
        dir.path(),
        &[
            "symmetric",
            "--n",
            "6",
            "--profile",
            "0:0,6:0,3:1",
            "--verify-d",
            "--json",
        ],
    );
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["gap"], 3);
    assert_eq!(v["d"], 4);
    assert_eq!(v["tree_d"], 4);
}

#[test]
fn symmetric_montecarlo_is_seeded() {
    let dir = workspace();
    let args = [
        "symmetric",
        "--n",
        "8",
        "--profile",
        "0:0,8:1",
        "--montecarlo",
        "50",
        "--json",
        "--seed",
        "5",
    ];
    let a = stdout(&querylab(dir.path(), &args));
    let b = stdout(&querylab(dir.path(), &args));
    assert_eq!(a, b);
}

#[test]
fn slice_within_bound() {
    let dir = workspace();
    let o = querylab(dir.path(), &["slice", "slice.pbf", "--verify-bound", "--json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["k"], 2);
    assert_eq!(v["correct"], true);
    assert_eq!(v["within_bound"], true);
}

#[test]
fn complete_finds_witness() {
    let dir = workspace();
    let o = querylab(dir.path(), &["complete", "partial.pbf", "--measure", "D", "--json"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["value"], 3);
    assert_eq!(v["exact"], true);
}

#[test]
fn admissible_reports_criteria() {
    let dir = workspace();
    fs::write(
        dir.path().join("and.poly"),
        "n 2\nbasis fourier\n00 0.5\n10 0.5\n01 0.5\n11 -0.5\n",
    )
    .unwrap();
    let o = querylab(dir.path(), &["admissible", "and.pbf", "and.poly", "--c", "2", "--json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["covering_radius"], 0);
    assert_eq!(v["implication_holds"], true);
}

#[test]
fn pf_pipeline_agrees_with_satisfiability() {
    let dir = workspace();
    for (cnf, expected) in [("sat.cnf", "YES"), ("unsat.cnf", "NO")] {
        let o = querylab(dir.path(), &["pf-reduce", cnf, "--out", "inst.json"]);
        assert!(o.status.success());
        let o = querylab(
            dir.path(),
            &["pf-solve", "inst.json", "--origin", "sat-reduced", "--json"],
        );
        assert!(o.status.success());
        assert_eq!(json(&o)["verdict"], expected);
    }
}

#[test]
fn pf_general_never_says_no() {
    let dir = workspace();
    querylab(dir.path(), &["pf-reduce", "unsat.cnf", "--out", "inst.json"]);
    let o = querylab(dir.path(), &["pf-solve", "inst.json", "--effort", "8", "--json"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["verdict"], "UNKNOWN");
}

#[test]
fn verify_reports_are_byte_identical() {
    let dir = workspace();
    let run = |jobs: &str, out: &str| {
        let o = querylab(
            dir.path(),
            &[
                "verify",
                "--suite",
                "s5-pf",
                "--instances",
                "6",
                "--seed",
                "3",
                "--jobs",
                jobs,
                "--out",
                out,
            ],
        );
        assert!(o.status.success());
        fs::read(dir.path().join(out)).unwrap()
    };
    let a = run("1", "a.json");
    let b = run("0", "b.json");
    assert_eq!(a, b);
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["suite"], "s5-pf");
    assert_eq!(v["records"].as_array().unwrap().len(), 6);
}

#[test]
fn verify_short_suite_name() {
    let dir = workspace();
    let o = querylab(
        dir.path(),
        &["verify", "--suite", "s3", "--n", "3", "--instances", "5", "--json"],
    );
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["suite"], "s3-inequalities");
    assert_eq!(v["passed"], true);
}

#[test]
fn usage_errors_exit_nonzero() {
    let dir = workspace();
    let o = querylab(dir.path(), &["verify", "--suite", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown suite"));
    let o = querylab(dir.path(), &["measures", "missing.pbf"]);
    assert_eq!(o.status.code(), Some(2));
    fs::write(dir.path().join("bad.pbf"), "n 2\ntable 01\n").unwrap();
    let o = querylab(dir.path(), &["measures", "bad.pbf"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let o = querylab(dir.path(), &["pf-solve", "x.json", "--origin", "weird"]);
    assert_eq!(o.status.code(), Some(2));
}
