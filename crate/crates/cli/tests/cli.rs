use std::path::Path;
use std::process::{Command, Output};

fn robsub(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robsub"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn bench_to(path: &Path, threads: &str) {
    let out = robsub(&[
        "bench",
        "--set",
        "n=30",
        "--set",
        "k=3",
        "--repetitions",
        "3",
        "--algorithm",
        "all",
        "--seed",
        "11",
        "--no-timing",
        "--threads",
        threads,
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn bench_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (
        dir.path().join("a.jsonl"),
        dir.path().join("b.jsonl"),
        dir.path().join("c.jsonl"),
    );
    bench_to(&a, "1");
    bench_to(&b, "1");
    bench_to(&c, "3");
    let first = std::fs::read(&a).unwrap();
    assert!(!first.is_empty());
    assert_eq!(first, std::fs::read(&b).unwrap());
    assert_eq!(first, std::fs::read(&c).unwrap());
    // 4 algorithms + 2 baselines, 3 repetitions each
    assert_eq!(first.iter().filter(|&&c| c == b'\n').count(), 18);
}

#[test]
fn bench_then_profile() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("r.jsonl");
    bench_to(&records, "2");
    let csv = dir.path().join("p.csv");
    let out = robsub(&[
        "profile",
        records.to_str().unwrap(),
        "--metric",
        "f-calls",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,e-g,e-stochg,e-thg,prev-e-g"));
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first[0], 1.0);
    // someone wins every instance
    assert!(first[1..].iter().sum::<f64>() >= 1.0);
    // timings were disabled
    let out = robsub(&["profile", records.to_str().unwrap(), "--metric", "time"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_prints_json_results() {
    let out = robsub(&[
        "solve",
        "--set",
        "n=25",
        "--set",
        "k=2",
        "--algorithm",
        "e-g,e-thg",
        "--no-early-stop",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let results: Vec<serde_json::Value> = stdout.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(results.len(), 2);
    assert_eq!(results[1]["algorithm"], "e-thg");
    for r in &results {
        let lb = r["lb"].as_f64().unwrap();
        let ub = r["ub"].as_f64().unwrap();
        assert!(lb <= ub);
        assert!(!r["union"].as_array().unwrap().is_empty());
    }
}

#[test]
fn config_file_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "kind = coverage-synthetic\nn = 20\nk = 2\nalgorithm = e-stochg\n").unwrap();
    let out = robsub(&["solve", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"e-stochg\""));

    std::fs::write(&cfg, "kind = coverage-synthetic\nn = twenty\n").unwrap();
    let out = robsub(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let out = robsub(&["solve", "--algorithm", "simplex"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_reports_every_check() {
    let out = robsub(&["verify", "--cases", "2"]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert!(lines.len() >= 8);
    assert!(lines.iter().all(|l| l.starts_with("[PASS]") || l.starts_with("[FAIL]")));
    let all_pass = lines.iter().all(|l| l.starts_with("[PASS]"));
    assert_eq!(out.status.success(), all_pass);
}
