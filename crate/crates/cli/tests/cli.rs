use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn negsp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_negsp")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn generate(dir: &Path, name: &str, extra: &[&str]) -> String {
    let path = dir.join(name);
    let path = path.to_str().unwrap();
    let mut args = vec!["gen", "--output", path];
    args.extend_from_slice(extra);
    let out = negsp(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    path.to_owned()
}

#[test]
fn sssp_on_a_small_file() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "g.txt", "c tiny\np sp 4 4\na 1 2 4\na 1 3 1\na 3 2 -2\na 2 4 1\n");
    let out = negsp(&["sssp", f.to_str().unwrap(), "--check"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["distances"], serde_json::json!([0, -1, 1, 0]));
    assert_eq!(r["error"], false);
    assert_eq!(r["bellman_ford_agrees"], true);
    assert_eq!(r["seed"], 0);
    assert!(r["stats"]["calls"].as_u64().unwrap() > 0);
    assert!(r["params"]["effective"]["k"].as_u64().is_some());
}

#[test]
fn unreachable_vertices_print_inf() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "g.txt", "p sp 3 1\na 2 3 -1\n");
    let r = json(&negsp(&["sssp", f.to_str().unwrap()]));
    assert_eq!(r["distances"], serde_json::json!([0, "inf", "inf"]));
    let tsv = negsp(&["sssp", f.to_str().unwrap(), "--format", "tsv"]);
    assert_eq!(String::from_utf8(tsv.stdout).unwrap(), "1\t0\n2\tinf\n3\tinf\n");
}

#[test]
fn negative_cycle_under_expect_no_cycle_exits_2() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "g.txt", "p sp 3 3\na 1 2 1\na 2 3 -3\na 3 2 1\n");
    let out = negsp(&["sssp", f.to_str().unwrap(), "--expect-no-cycle", "--max-retries", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let r = json(&out);
    assert_eq!(r["error"], true);
    assert_eq!(r["distances"], Value::Null);
    // a verified witness ends the retries at once
    assert_eq!(r["cause"]["kind"], "negative_cycle");
    assert!(r["cause"]["witness"]["weight"].as_i64().unwrap() < 0);
    assert!(r["retries"].as_u64().unwrap() <= 3);
}

#[test]
fn check_flag_agrees_on_random_fixtures() {
    let dir = TempDir::new().unwrap();
    for seed in 0..100 {
        let seed = seed.to_string();
        let f = generate(dir.path(), "g.txt", &["--n", "12", "--no-negative-cycle", "--seed", &seed]);
        let out = negsp(&["sssp", &f, "--check", "--expect-no-cycle", "--seed", &seed]);
        assert_eq!(out.status.code(), Some(0), "seed {seed}");
        assert_eq!(json(&out)["bellman_ford_agrees"], true, "seed {seed}");
    }
}

#[test]
fn planted_cycle_is_solved_to_a_witness() {
    let dir = TempDir::new().unwrap();
    for seed in ["1", "2", "3"] {
        let f = generate(dir.path(), "p.txt", &["--n", "15", "--plant-negative-cycle", "--seed", seed]);
        let text = std::fs::read_to_string(&f).unwrap();
        assert!(text.lines().any(|l| l.starts_with("c planted cycle")));
        let out = negsp(&["solve", &f, "--seed", seed]);
        assert_eq!(out.status.code(), Some(0));
        let r = json(&out);
        assert!(r["weight"].as_i64().unwrap() < 0);
        let cycle = r["cycle"].as_array().unwrap();
        assert_eq!(cycle.first(), cycle.last());
        assert_eq!(cycle.len(), r["edges"].as_array().unwrap().len() + 1);
    }
}

#[test]
fn cycle_free_instance_runs_and_checks_clean() {
    let dir = TempDir::new().unwrap();
    let f = generate(dir.path(), "g.txt", &["--n", "20", "--no-negative-cycle", "--seed", "7"]);
    assert_eq!(negsp(&["sssp", &f, "--expect-no-cycle"]).status.code(), Some(0));
    let out = negsp(&["check", &f]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let r = json(&out);
    assert_eq!(r["ok"], true);
    assert_eq!(r["checks"].as_array().unwrap().len(), 4);
}

#[test]
fn check_on_a_planted_instance() {
    let dir = TempDir::new().unwrap();
    let f = generate(dir.path(), "p.txt", &["--n", "12", "--plant-negative-cycle", "--seed", "4"]);
    let r = json(&negsp(&["check", &f]));
    assert_eq!(r["ok"], true);
}

#[test]
fn ldd_verdict_is_ok() {
    let dir = TempDir::new().unwrap();
    let f = generate(dir.path(), "g.txt", &["--n", "40", "--min-weight", "0", "--max-weight", "9", "--seed", "2"]);
    for d in ["3", "10", "40"] {
        let out = negsp(&["ldd", &f, "--diameter", d]);
        assert_eq!(out.status.code(), Some(0));
        let r = json(&out);
        assert_eq!(r["verification"]["verdict"], "ok");
        assert_eq!(r["verification"]["method"], "all_pairs");
        assert_eq!(r["removed_count"].as_u64().unwrap() as usize, r["removed"].as_array().unwrap().len());
    }
}

#[test]
fn ldd_rejects_negative_weights() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "g.txt", "p sp 2 2\na 1 2 3\na 2 1 -1\n");
    let out = negsp(&["ldd", f.to_str().unwrap(), "--diameter", "4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("arc 2"));
}

#[test]
fn scc_reports_labels_and_check() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "g.txt", "p sp 5 5\na 1 2 1\na 2 1 1\na 2 3 1\na 3 4 1\na 4 3 1\n");
    let out = negsp(&["scc", f.to_str().unwrap(), "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["components"], 3);
    assert_eq!(r["condensation_edges"], 1);
    assert_eq!(r["check"]["partition_matches"], true);
    assert_eq!(r["check"]["topological_order"], true);
    let labels = r["labels"].as_array().unwrap();
    assert_eq!(labels.len(), 5);
    assert_eq!(labels[0][0], 1);
}

#[test]
fn reports_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let f = generate(dir.path(), "g.txt", &["--n", "25", "--no-negative-cycle", "--seed", "9"]);
    let run = |threads: &str| negsp(&["sssp", &f, "--seed", "5", "--threads", threads]).stdout;
    let one = run("1");
    assert_eq!(one, run("1"));
    let mut a = json(&negsp(&["sssp", &f, "--seed", "5", "--threads", "1"]));
    let mut b = json(&negsp(&["sssp", &f, "--seed", "5", "--threads", "4"]));
    assert_eq!(a["distances"], b["distances"]);
    a["params"]["threads"] = Value::Null;
    b["params"]["threads"] = Value::Null;
    assert_eq!(a, b);
}

#[test]
fn gen_to_stdout_is_dimacs() {
    let out = negsp(&["gen", "--n", "6", "--p", "0.5", "--seed", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("p sp 6 ")));
    assert_eq!(text, String::from_utf8(negsp(&["gen", "--n", "6", "--p", "0.5", "--seed", "1"]).stdout).unwrap());
}

#[test]
fn parse_errors_name_the_line() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "bad.txt", "p sp 2 1\na 1 x 3\n");
    let out = negsp(&["sssp", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn usage_and_io_errors_exit_1() {
    assert_eq!(negsp(&["sssp"]).status.code(), Some(1));
    assert_eq!(negsp(&["sssp", "/nonexistent/graph.txt"]).status.code(), Some(1));
    assert_eq!(negsp(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(negsp(&["--help"]).status.code(), Some(0));
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "g.txt", "p sp 2 1\na 1 2 3\n");
    assert_eq!(negsp(&["sssp", f.to_str().unwrap(), "--source", "3"]).status.code(), Some(1));
}

#[test]
fn weight_bound_is_enforced() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "g.txt", "p sp 2 1\na 1 2 100\n");
    assert_eq!(negsp(&["sssp", f.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(negsp(&["sssp", f.to_str().unwrap(), "--weight-bound", "none"]).status.code(), Some(0));
    assert_eq!(negsp(&["sssp", f.to_str().unwrap(), "--weight-bound", "100"]).status.code(), Some(0));
}
