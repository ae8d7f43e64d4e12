use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/mps/good").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_halpern-lp"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

fn solve_json(args: &[&str]) -> (i32, Value) {
    let out = run(args);
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let v = serde_json::from_str(&text).unwrap_or_else(|e| {
        panic!("bad json ({e}): {text}\nstderr: {}", String::from_utf8_lossy(&out.stderr))
    });
    (code(&out), v)
}

fn num(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

#[test]
fn e1_solves_optimal() {
    let e1 = fixture("e1.mps");
    let (c, v) = solve_json(&["solve", path_str(&e1)]);
    assert_eq!(c, 0);
    assert_eq!(v["status"], "optimal");
    assert!((num(&v["solution"]["x"][0]) - 1.0).abs() < 1e-6);
    assert!(num(&v["solution"]["y"][0]).abs() < 1e-6);
    assert!(v["certificate"].is_null());
    assert!(v["timing"]["wall_seconds"].is_number());
}

#[test]
fn fixed_format_instance() {
    let p = fixture("spaced_names.fixed.mps");
    let (c, v) = solve_json(&["solve", path_str(&p), "--format", "fixed"]);
    assert_eq!(c, 0);
    assert!((num(&v["primal_objective"]) - 12.0).abs() < 1e-6);
    let free = run(&["solve", path_str(&p)]);
    assert_eq!(code(&free), 1);
}

#[test]
fn primal_infeasible_exits_2_with_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("pinf.json");
    let lp = fixture("primal_infeasible.mps");
    let out = run(&["solve", path_str(&lp), "--json-out", path_str(&report)]);
    assert_eq!(code(&out), 2);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["status"], "primal_infeasible");
    assert!(v["solution"].is_null());
    let ray = v["certificate"]["dual_ray"].as_array().expect("dual ray");
    assert_eq!(ray.len(), 2);
    let (y1, y2) = (num(&ray[0]), num(&ray[1]));
    // Aᵀy = y1 + y2 ≤ 0 and bᵀy = y1 + 2 y2 > 0.
    assert!(y1 + y2 <= 1e-6 * y1.abs().max(y2.abs()));
    assert!(y1 + 2.0 * y2 > 0.0);
    assert_eq!(v["certificate"]["primal_check"]["valid"], true);

    let check = run(&["check-certificate", path_str(&lp), path_str(&report)]);
    assert_eq!(code(&check), 0, "{}", String::from_utf8_lossy(&check.stdout));
}

#[test]
fn dual_infeasible_exits_2_with_ray() {
    let lp = fixture("dual_infeasible.mps");
    let (c, v) = solve_json(&["solve", path_str(&lp)]);
    assert_eq!(c, 2);
    assert_eq!(v["status"], "dual_infeasible");
    let ray: Vec<f64> = v["certificate"]["primal_ray"]
        .as_array()
        .expect("primal ray")
        .iter()
        .map(num)
        .collect();
    assert!(ray.iter().all(|&u| u >= -1e-9));
    assert!(-ray[0] < 0.0);
}

#[test]
fn zero_tolerance_is_a_config_error() {
    let e1 = fixture("e1.mps");
    let out = run(&["solve", path_str(&e1), "--tol", "0"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("tolerance"));
    assert!(out.stdout.is_empty());
}

#[test]
fn bad_arguments_exit_1() {
    let e1 = fixture("e1.mps");
    for args in [
        vec!["solve", path_str(&e1), "--restart", "sometimes"],
        vec!["solve", path_str(&e1), "--restart", "fixed:0"],
        vec!["solve", path_str(&e1), "--scheme", "simplex"],
        vec!["solve", path_str(&e1), "--time-limit", "0"],
        vec!["solve", path_str(&e1), "--eta", "10"],
        vec!["solve", "/nonexistent/file.mps"],
        vec!["frobnicate"],
    ] {
        assert_eq!(code(&run(&args)), 1, "{args:?}");
    }
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn iteration_limit_exits_3() {
    let t = fixture("transport.mps");
    let (c, v) = solve_json(&["solve", path_str(&t), "--iter-limit", "5"]);
    assert_eq!(c, 3);
    assert_eq!(v["status"], "iteration_limit");
    assert_eq!(v["iterations"], 5);
    assert!(v["solution"]["x"].is_array());
}

#[test]
fn restart_and_scheme_flags() {
    let t = fixture("transport.mps");
    for (flag, value, field) in [
        ("--restart", "fixed:64", "restart"),
        ("--restart", "none", "restart"),
        ("--scheme", "vanilla", "scheme"),
        ("--scheme", "averaged", "scheme"),
        ("--scheme", "restarted-average", "scheme"),
    ] {
        let (c, v) = solve_json(&["solve", path_str(&t), "--tol", "1e-4", flag, value]);
        assert_eq!(c, 0, "{value}");
        assert!((num(&v["primal_objective"]) - 200.0).abs() < 0.5, "{value}");
        assert_eq!(v["config"][field], value);
    }
}

#[test]
fn reports_are_deterministic_without_timing() {
    let dir = tempfile::tempdir().unwrap();
    let t = fixture("transport.mps");
    let mut outputs = Vec::new();
    for i in 0..2 {
        let p = dir.path().join(format!("run{i}.json"));
        let out = run(&["solve", path_str(&t), "--seed", "7", "--no-timing", "--json-out", path_str(&p)]);
        assert_eq!(code(&out), 0);
        outputs.push(std::fs::read(&p).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert!(!String::from_utf8_lossy(&outputs[0]).contains("wall_seconds"));
}

#[test]
fn vectors_can_be_elided() {
    let t = fixture("transport.mps");
    let (c, v) = solve_json(&["solve", path_str(&t), "--max-vector-len", "3"]);
    assert_eq!(c, 0);
    assert_eq!(v["vectors_elided"], true);
    assert!(v["solution"]["x"].is_null());
}

#[test]
fn trace_csv_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let e1 = fixture("e1.mps");
    let out = run(&[
        "solve",
        path_str(&e1),
        "--trace",
        path_str(&trace),
        "--trace-period",
        "5",
        "--json-out",
        path_str(&dir.path().join("r.json")),
    ]);
    assert_eq!(code(&out), 0);
    let csv = std::fs::read_to_string(&trace).unwrap();
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("iteration,epoch,inner,fixed_point_residual"));
    let cols = header.split(',').count();
    let rows: Vec<&str> = lines.collect();
    assert!(rows.len() > 3);
    assert!(rows.iter().all(|r| r.split(',').count() == cols));
    let iters: Vec<u64> = rows.iter().map(|r| r.split(',').next().unwrap().parse().unwrap()).collect();
    assert!(iters.windows(2).all(|w| w[0] < w[1]));
}

fn write_cert(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn check_certificate_hand_vectors() {
    let dir = tempfile::tempdir().unwrap();
    let lp = fixture("primal_infeasible.mps");
    let cases = [
        (r#"{"kind": "primal", "vector": [-1, 1]}"#, 0),
        (r#"{"kind": "primal", "vector": [1, -1]}"#, 0),
        (r#"{"kind": "primal", "vector": [0, 0]}"#, 1),
        (r#"{"kind": "primal", "vector": [1, 1]}"#, 1),
        (r#"{"kind": "dual", "vector": [1]}"#, 1),
    ];
    for (i, (body, expected)) in cases.iter().enumerate() {
        let cert = write_cert(dir.path(), &format!("c{i}.json"), body);
        let out = run(&["check-certificate", path_str(&lp), path_str(&cert)]);
        assert_eq!(code(&out), *expected, "{body}");
        let stdout = String::from_utf8_lossy(&out.stdout);
        assert!(stdout.contains("\"orientation\""), "{stdout}");
    }
    let negated = write_cert(dir.path(), "neg.json", r#"{"kind": "primal", "vector": [1, -1]}"#);
    let out = run(&["check-certificate", path_str(&lp), path_str(&negated)]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"negated\""));
}

#[test]
fn check_certificate_dual_ray() {
    let dir = tempfile::tempdir().unwrap();
    let lp = fixture("dual_infeasible.mps");
    let good = write_cert(dir.path(), "good.json", r#"{"kind": "dual", "vector": [1, 1]}"#);
    let bad = write_cert(dir.path(), "bad.json", r#"{"kind": "dual", "vector": [1, 0]}"#);
    assert_eq!(code(&run(&["check-certificate", path_str(&lp), path_str(&good)])), 0);
    assert_eq!(code(&run(&["check-certificate", path_str(&lp), path_str(&bad)])), 1);
}

#[test]
fn check_certificate_errors() {
    let dir = tempfile::tempdir().unwrap();
    let lp = fixture("primal_infeasible.mps");
    let wrong = write_cert(dir.path(), "wrong.json", r#"{"kind": "primal", "vector": [1, 2, 3]}"#);
    let out = run(&["check-certificate", path_str(&lp), path_str(&wrong)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("entries"));

    let malformed = write_cert(dir.path(), "bad.json", r#"{"kind": "sideways", "vector": []}"#);
    let out = run(&["check-certificate", path_str(&lp), path_str(&malformed)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    let optimal = dir.path().join("opt.json");
    let e1 = fixture("e1.mps");
    run(&["solve", path_str(&e1), "--json-out", path_str(&optimal)]);
    let out = run(&["check-certificate", path_str(&e1), path_str(&optimal)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("no certificate"));
}

fn bench_dir(names: &[&str]) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for n in names {
        std::fs::copy(fixture(n), dir.path().join(n)).unwrap();
    }
    dir
}

#[test]
fn bench_runs_directory() {
    let dir = bench_dir(&["e1.mps", "transport.mps", "primal_infeasible.mps"]);
    let summary = dir.path().join("summary.json");
    let out = run(&["bench", path_str(dir.path()), "--time-limit", "60", "--json-out", path_str(&summary)]);
    assert_eq!(code(&out), 0);
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.contains("transport") && table.contains("solved 3/3"), "{table}");
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    let rows = v["rows"].as_array().unwrap();
    let names: Vec<&str> = rows.iter().map(|r| r["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["e1", "primal_infeasible", "transport"]);
    assert_eq!(rows[1]["status"], "primal_infeasible");
    assert_eq!(v["solved"], 3);
    assert_eq!(v["shift"], 10.0);
    assert!(num(&v["sgm"]) >= 0.0 && num(&v["sgm"]) < 60.0);
}

#[test]
fn bench_counts_unsolved_at_time_limit() {
    let dir = bench_dir(&["e1.mps", "transport.mps"]);
    let out = run(&["bench", path_str(dir.path()), "--iter-limit", "1", "--time-limit", "60", "--jobs", "2"]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    let json = &stdout[stdout.find('{').unwrap()..];
    let v: Value = serde_json::from_str(json).unwrap();
    assert_eq!(v["solved"], 0);
    // Every time equals the limit, so the SGM is the limit itself.
    assert!((num(&v["sgm"]) - 60.0).abs() < 1e-9);
    assert_eq!(v["by_bucket"]["small"]["total"], 2);
}

#[test]
fn bench_reports_broken_files_and_jobs_agree() {
    let dir = bench_dir(&["e1.mps", "transport.mps", "small.mps"]);
    std::fs::write(dir.path().join("broken.mps"), "ROWS\n N obj\nBOGUS\n").unwrap();
    let mut statuses = Vec::new();
    for jobs in ["1", "3"] {
        let p = dir.path().join(format!("s{jobs}.json"));
        let out = run(&["bench", path_str(dir.path()), "--jobs", jobs, "--json-out", path_str(&p)]);
        assert_eq!(code(&out), 0);
        let v: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
        let rows: Vec<(String, Value, u64)> = v["rows"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| (r["name"].as_str().unwrap().to_string(), r["status"].clone(), r["iterations"].as_u64().unwrap()))
            .collect();
        assert_eq!(rows[0].0, "broken");
        assert!(rows[0].1.is_null());
        statuses.push(rows);
    }
    assert_eq!(statuses[0], statuses[1]);
}

#[test]
fn bench_empty_directory_fails() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("notes.txt"), "not an lp").unwrap();
    let out = run(&["bench", path_str(dir.path())]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("no .mps files"));
}
