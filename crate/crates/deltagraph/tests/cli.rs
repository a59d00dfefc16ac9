use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_deltagraph"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn build(dir: &Path, args: &[&str]) {
    let o = run(dir, args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn cover_of_double_chain_is_grid_dot() {
    let dir = TempDir::new().unwrap();
    build(dir.path(), &["build", "double_chain", "a=2", "b=3", "--radius", "2", "--out", "g.dg"]);
    let o = run(dir.path(), &["cover", "g.dg", "--radius", "2", "--export-dot"]);
    assert_eq!(o.status.code(), Some(0));
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph"));
    let nodes = dot.lines().filter(|l| l.trim_start().starts_with('v') && !l.contains("->")).count();
    let edges = dot.lines().filter(|l| l.contains("->")).count();
    // The radius-2 ball of Z^2: 13 vertices, 4 edges out of each of the 5
    // interior ones and 12 edges from the boundary ring back inwards.
    assert_eq!(nodes, 13);
    assert_eq!(edges, 5 * 4 + 12, "{dot}");
    assert_eq!(dot.matches("style=dashed").count(), 8);
}

#[test]
fn spectrum_of_double_chain() {
    let dir = TempDir::new().unwrap();
    build(dir.path(), &["build", "double_chain", "a=2", "b=3", "--radius", "2", "--out", "g.dg"]);
    let o = run(dir.path(), &["spectrum", "g.dg", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "a*b^-1:2 1:4 a^-1*b:2\n");
    let o = run(dir.path(), &["spectrum", "g.dg", "--n", "2", "--float"]);
    let pairs: Vec<(f64, usize)> = stdout(&o)
        .split_whitespace()
        .map(|p| {
            let (v, m) = p.split_once(':').unwrap();
            (v.parse().unwrap(), m.parse().unwrap())
        })
        .collect();
    assert_eq!(pairs.len(), 3);
    for ((v, m), (ev, em)) in pairs.iter().zip([(2.0 / 3.0, 2), (1.0, 4), (1.5, 2)]) {
        assert!((v - ev).abs() < 1e-12 && *m == em);
    }
}

#[test]
fn invariants_gate_on_non_tracial_input() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["invariants", "--example", "double_chain", "-p", "a=2", "-p", "b=3", "--radius", "1", "--shift-bound", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let line = stdout(&o);
    assert!(line.starts_with("FAIL tracial witness="), "{line}");
    assert!(line.trim_end().ends_with("weight=a*b^-1") || line.trim_end().ends_with("weight=a^-1*b"), "{line}");
}

#[test]
fn invariants_of_single_chain() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["invariants", "--example", "single_chain", "-p", "q=2", "--radius", "3", "--shift-bound", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("generators q\n"), "{text}");
    assert!(text.contains("certified-radius 3\n"));
    let o = run(dir.path(), &["invariants", "--example", "cycle", "-p", "n=4", "-p", "q=1", "--radius", "2", "--shift-bound", "2"]);
    assert!(stdout(&o).contains("generators 1\n"));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let usage = |args: &[&str]| run(dir.path(), args).status.code();
    assert_eq!(usage(&["frobnicate"]), Some(2));
    assert_eq!(usage(&["validate"]), Some(2));
    assert_eq!(usage(&["validate", "x.dg", "--example", "single_chain"]), Some(2));
    assert_eq!(usage(&["validate", "missing.dg"]), Some(2));
    assert_eq!(usage(&["validate", "--example", "single_chain"]), Some(2));
    assert_eq!(usage(&["validate", "--example", "single_chain", "-p", "q=1"]), Some(2));
    std::fs::write(dir.path().join("bad.dg"), "delta-graph v1\ndelta x\n").unwrap();
    let o = run(dir.path(), &["validate", "bad.dg"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert_eq!(usage(&["validate", "--example", "single_chain", "-p", "q=2", "--radius", "6"]), Some(0));
}

#[test]
fn validation_failure_reports_check() {
    let dir = TempDir::new().unwrap();
    build(dir.path(), &["build", "single_chain", "q=2", "--radius", "3", "--out", "c.dg"]);
    let text = std::fs::read_to_string(dir.path().join("c.dg")).unwrap();
    let broken = text.replace("edge 0:0 0 1 weight q conjugate", "edge 0:0 0 1 weight q^2 conjugate");
    assert_ne!(broken, text);
    std::fs::write(dir.path().join("b.dg"), broken).unwrap();
    let o = run(dir.path(), &["validate", "b.dg", "--radius", "3"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("FAIL fairness ")), "{out}");
    assert!(out.lines().any(|l| l.starts_with("FAIL conjugate-weights ")), "{out}");
    assert!(out.contains("PASS involution\n"));
}

#[test]
fn quotients() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["quotient", "--example", "single_chain", "-p", "q=2", "--shift", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("vertex ")).count(), 3);
    let o = run(dir.path(), &["quotient", "--example", "grid", "-p", "a=2", "-p", "b=3", "--shift=1,-1", "--radius", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("vertex ")).count(), 5);
    build(dir.path(), &["build", "single_chain", "q=2", "--radius", "6", "--out", "c.dg"]);
    let mut doc = std::fs::read_to_string(dir.path().join("c.dg")).unwrap();
    doc.push_str("action h weight q^3\n");
    for m in -6..=3 {
        doc.push_str(&format!("map {m} {}\n", m + 3));
    }
    std::fs::write(dir.path().join("a.dg"), &doc).unwrap();
    let o = run(dir.path(), &["quotient", "a.dg", "--radius", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("vertex ")).count(), 3);
    assert_eq!(std::fs::read_to_string(dir.path().join("a.dg")).unwrap(), doc);

    std::fs::write(dir.path().join("w.dg"), doc.replace("action h weight q^3", "action h weight q^2")).unwrap();
    let o = run(dir.path(), &["quotient", "w.dg", "--radius", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("FAIL weight-scaling generator=h "), "{}", stdout(&o));
}

#[test]
fn tl_check_and_recover() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["tl-check", "--example", "single_chain", "-p", "q=2", "--max-len", "4", "--gram-len", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().all(|l| l.starts_with("PASS ")));
    assert!(out.contains("PASS delooping n=4 "));
    let o = run(dir.path(), &["recover", "--example", "cycle", "-p", "n=3", "-p", "q=2", "--radius", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("vertex ")).count(), 3);
}

#[test]
fn loops_listing() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["loops", "--example", "double_chain", "-p", "a=2", "-p", "b=3", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 8);
    assert_eq!(out.lines().filter(|l| l.starts_with("1\t")).count(), 4);
    let o = run(dir.path(), &["loops", "--example", "single_chain", "-p", "q=2", "--n", "0"]);
    assert_eq!(stdout(&o), "1\t-\n");
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    for args in [
        &["export-dot", "--example", "grid", "-p", "a=2", "-p", "b=3", "--radius", "2"][..],
        &["cover", "--example", "double_chain", "-p", "a=2", "-p", "b=3", "--radius", "3"][..],
        &["build", "deformed_chain", "q=1.05", "x=0.3", "--radius", "3"][..],
    ] {
        let a = run(dir.path(), args);
        let b = run(dir.path(), args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn in_process_runner() {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = deltagraph::cli::run(
        ["deltagraph", "export-dot", "--example", "cycle", "-p", "n=1", "-p", "q=1", "--radius", "0"],
        &mut out,
        &mut err,
    );
    assert_eq!(code, 0, "{}", String::from_utf8_lossy(&err));
    let dot = String::from_utf8(out).unwrap();
    assert!(dot.contains("v0 [label=\"*\""));
}
