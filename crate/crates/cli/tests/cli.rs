use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const TRIANGLE: &str = "\
header 3 3 1 0
vertex a 1:1
vertex b 1:1
vertex c 1:1
edge a b
edge b c
edge a c
";

/// `a` and `c` share a cheap interface `b` lacks, so they must connect
/// through `b` on interface 1.
const PATH_AC: &str = "\
header 3 2 2 1
vertex a 1:1 2:0.5
vertex b 1:0.75
vertex c 1:1 2:0.5
edge a b
edge b c
group a c
";

fn mina(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mina"))
        .args(args)
        .env_remove("MINA_THREADS")
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

#[test]
fn solve_triangle_with_every_coverage_algorithm() {
    let dir = TempDir::new().unwrap();
    let tri = write(&dir, "tri.txt", TRIANGLE);
    for algo in ["coverage:k", "coverage:logm", "coverage:exact"] {
        let out = mina(&["solve", s(&tri), "--algo", algo]);
        assert!(out.status.success(), "{algo}");
        let report = json(&out);
        assert_eq!(report["feasible"], true);
        assert_eq!(report["max_cost_exact"], "1");
    }
}

#[test]
fn repeated_solves_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let tri = write(&dir, "tri.txt", TRIANGLE);
    let args = ["--trials", "200", "--seed", "1", "solve", s(&tri), "--algo", "coverage:logm"];
    let a = mina(&args);
    let b = mina(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["runs"], 600);
}

#[test]
fn connectivity_on_a_path_matches_the_exact_cost() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "path.txt", PATH_AC);
    let exact = json(&mina(&["solve", s(&path), "--algo", "connectivity:exact"]));
    let rounded = mina(&["solve", s(&path), "--algo", "connectivity:logm2"]);
    assert!(rounded.status.success());
    let rounded = json(&rounded);
    assert_eq!(rounded["feasible"], true);
    assert_eq!(exact["max_cost_exact"], "1");
    assert_eq!(rounded["max_cost_exact"], exact["max_cost_exact"]);
    assert!(rounded["H_size"].is_u64());
}

#[test]
fn solve_writes_report_and_assignment_files() {
    let dir = TempDir::new().unwrap();
    let tri = write(&dir, "tri.txt", TRIANGLE);
    let report = dir.path().join("r.json");
    let active = dir.path().join("a.txt");
    let out = mina(&[
        "--out", "text", "solve", s(&tri), "--algo", "coverage:k", "--report", s(&report),
        "--assignment", s(&active),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("algo: coverage:k\n"));
    let saved: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(saved["feasible"], true);
    let verdict = mina(&["verify", s(&tri), s(&active)]);
    assert!(verdict.status.success());
    assert_eq!(json(&verdict)["ok"], true);
}

#[test]
fn input_errors_exit_with_2() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.txt");
    assert_eq!(mina(&["solve", s(&missing), "--algo", "coverage:k"]).status.code(), Some(2));
    let bad = write(&dir, "bad.txt", "header 2 1 2 0\nvertex a 1:1\nvertex b 2:1\nedge a b\n");
    let out = mina(&["solve", s(&bad), "--algo", "coverage:k"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("common interface"));
}

#[test]
fn exact_budget_overflow_is_a_solver_error() {
    let dir = TempDir::new().unwrap();
    let tri = write(&dir, "tri.txt", TRIANGLE);
    let out = mina(&["--budget", "2", "solve", s(&tri), "--algo", "coverage:exact"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_reports_uncovered_edges_and_split_groups() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "path.txt", PATH_AC);
    let active = write(&dir, "a.txt", "active a 1 2\nactive c 2\n");
    let cover = mina(&["verify", s(&path), s(&active)]);
    assert_eq!(cover.status.code(), Some(1));
    let d = json(&cover);
    assert_eq!(d["ok"], false);
    assert_eq!(d["uncovered"].as_array().unwrap().len(), 2);
    assert_eq!(d["max_cost"], "1.5");
    let connect = json(&mina(&["verify", s(&path), s(&active), "--mode", "connecting"]));
    assert_eq!(connect["split_groups"][0]["parts"], serde_json::json!([["a"], ["c"]]));
}

#[test]
fn gen_is_deterministic_and_parseable() {
    let dir = TempDir::new().unwrap();
    let args = ["--seed", "9", "gen", "--n", "7", "--k", "3", "--groups", "2", "--group-size", "2"];
    let a = mina(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, mina(&args).stdout);
    let file = write(&dir, "g.txt", std::str::from_utf8(&a.stdout).unwrap());
    let out = mina(&["solve", s(&file), "--algo", "connectivity:exact"]);
    assert!(out.status.success());
}

fn bench_rows(args: &[&str]) -> Vec<csv::StringRecord> {
    let out = mina(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(
        r.headers().unwrap(),
        vec![
            "instance", "algo", "lp_bound", "cost", "exact_opt", "ratio_vs_exact", "ratio_vs_lp",
            "feasible_rate", "wall_time", "error"
        ]
    );
    r.records().map(Result::unwrap).collect()
}

fn field(row: &csv::StringRecord, i: usize) -> f64 {
    row[i].parse().unwrap_or_else(|_| panic!("column {i} empty in {row:?}"))
}

#[test]
fn bench_rows_respect_the_bounds() {
    let rows = bench_rows(&[
        "bench", "--count", "20", "--n", "7", "--k", "3", "--groups", "2", "--group-size", "2",
        "--algos", "coverage:k,coverage:logm,connectivity:logm2",
    ]);
    assert_eq!(rows.len(), 60);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(&row[0], format!("gen-{}", i / 3));
        assert!(row[9].is_empty(), "{row:?}");
        assert!(field(row, 6) >= 1.0 - 1e-6, "{row:?}");
        if &row[1] == "coverage:k" {
            assert!(field(row, 5) <= 3.0 + 1e-6, "{row:?}");
        }
    }
}

#[test]
fn bench_feasibility_rate_on_larger_instances() {
    let rows = bench_rows(&[
        "--trials", "200", "bench", "--count", "2", "--n", "12", "--density", "0.3", "--k", "3",
        "--algos", "coverage:logm",
    ]);
    for row in &rows {
        assert!(field(row, 7) >= 0.9, "{row:?}");
    }
}

#[test]
fn bench_order_does_not_depend_on_threads() {
    let dir = TempDir::new().unwrap();
    write(&dir, "b.txt", TRIANGLE);
    write(&dir, "a.txt", PATH_AC);
    let strip = |rows: Vec<csv::StringRecord>| -> Vec<Vec<String>> {
        rows.into_iter()
            .map(|r| r.iter().enumerate().filter(|&(i, _)| i != 8).map(|(_, f)| f.to_string()).collect())
            .collect()
    };
    let args = |t: &'static str| {
        vec![
            "--threads".to_string(), t.to_string(), "bench".into(), "--dir".into(),
            s(dir.path()).to_string(), "--algos".into(), "coverage:k,connectivity:exact".into(),
        ]
    };
    let one: Vec<String> = args("1");
    let four: Vec<String> = args("4");
    let one = strip(bench_rows(&one.iter().map(String::as_str).collect::<Vec<_>>()));
    let four = strip(bench_rows(&four.iter().map(String::as_str).collect::<Vec<_>>()));
    assert_eq!(one, four);
    assert_eq!(one[0][0], "a.txt");
    assert_eq!(one[3][0], "b.txt");
}
