use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn flowdec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flowdec"))
        .args(args)
        .env_remove("FLOWDEC_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn generate(dir: &Path, grid: &str, horizon: &str, fleets: &str, seed: &str) -> std::path::PathBuf {
    let path = dir.join("instance.json");
    let out = flowdec(&[
        "generate",
        "--rows",
        grid,
        "--cols",
        grid,
        "--horizon",
        horizon,
        "--fleets",
        fleets,
        "--fleet-size",
        "1",
        "--objects",
        "2",
        "--seed",
        seed,
        "--out",
        p(&path),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path
}

fn reward_line(text: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix("reward: "))
        .expect("reward line")
        .parse()
        .unwrap()
}

#[test]
fn solve_then_verify_every_algorithm() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), "3", "3", "2", "4");
    let mut values = Vec::new();
    for alg in ["flowdec", "private-first", "shared-first", "oracle"] {
        let sol = dir.path().join(format!("{alg}.json"));
        let out = flowdec(&[
            "solve",
            "--in",
            p(&inst),
            "--algorithm",
            alg,
            "--out",
            p(&sol),
        ]);
        assert_eq!(code(&out), 0, "{alg}");
        let solved = reward_line(&stdout(&out));
        let out = flowdec(&["verify", "--instance", p(&inst), "--solution", p(&sol)]);
        assert_eq!(code(&out), 0, "{alg}: {}", stdout(&out));
        assert!(stdout(&out).starts_with("feasible"));
        assert_eq!(reward_line(&stdout(&out)), solved);
        values.push(solved);
    }
    let opt = values[3];
    assert!(values[..3].iter().all(|&v| v <= opt + 1e-9));
    assert!(values[0] >= opt * 2.0 / 3.0 - 1e-9);
}

#[test]
fn tampered_shared_claim_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), "1", "2", "2", "0");
    let sol = dir.path().join("sol.json");
    assert_eq!(
        code(&flowdec(&["solve", "--in", p(&inst), "--out", p(&sol)])),
        0
    );
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&sol).unwrap()).unwrap();
    // one vertex, so every step carries shared reward and some fleet claims it
    let claim = doc["y"][0].clone();
    let other = if claim[0] == json!(1) { 2 } else { 1 };
    doc["y"]
        .as_array_mut()
        .unwrap()
        .push(json!([other, claim[1], claim[2]]));
    std::fs::write(&sol, doc.to_string()).unwrap();
    let out = flowdec(&["verify", "--instance", p(&inst), "--solution", p(&sol)]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("(1f)"), "{}", stdout(&out));
}

#[test]
fn malformed_inputs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), "2", "2", "1", "1");
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{ not json").unwrap();
    assert_eq!(code(&flowdec(&["solve", "--in", p(&junk)])), 2);
    assert_eq!(
        code(&flowdec(&[
            "verify",
            "--instance",
            p(&inst),
            "--solution",
            p(&junk)
        ])),
        2
    );
    assert_eq!(
        code(&flowdec(&[
            "solve",
            "--in",
            p(&dir.path().join("missing.json"))
        ])),
        2
    );
    assert_eq!(
        code(&flowdec(&[
            "generate",
            "--rows",
            "0",
            "--cols",
            "2",
            "--horizon",
            "1",
            "--fleets",
            "1",
            "--fleet-size",
            "1",
            "--objects",
            "1",
            "--out",
            p(&junk),
        ])),
        2
    );
    let out = Command::new(env!("CARGO_BIN_EXE_flowdec"))
        .args(["solve", "--in", p(&inst)])
        .env("FLOWDEC_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn oracle_refuses_large_instances() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), "10", "16", "8", "0");
    let out = flowdec(&["solve", "--in", p(&inst), "--algorithm", "oracle"]);
    assert_eq!(code(&out), 3);
    let out = flowdec(&["solve", "--in", p(&inst)]);
    assert_eq!(code(&out), 0);
}

#[test]
fn debug_network_writes_dot_files() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), "2", "2", "2", "3");
    let dot = dir.path().join("dot");
    assert_eq!(
        code(&flowdec(&[
            "solve",
            "--in",
            p(&inst),
            "--debug-network",
            p(&dot)
        ])),
        0
    );
    for name in [
        "pooled.dot",
        "private-first-fleet-1.dot",
        "private-first-fleet-2.dot",
        "shared-first-fleet-1.dot",
        "shared-first-fleet-2.dot",
    ] {
        let text = std::fs::read_to_string(dot.join(name)).unwrap();
        assert!(text.starts_with("digraph"), "{name}");
    }
}

fn bench(extra: &[&str]) -> Vec<csv::StringRecord> {
    let mut args = vec!["benchmark"];
    args.extend_from_slice(extra);
    let out = flowdec(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(
        r.headers().unwrap(),
        vec![
            "T",
            "F",
            "a",
            "n",
            "repeat",
            "seed",
            "algorithm",
            "runtime_ms",
            "value",
            "oracle_value",
            "approx_ratio",
            "timing_reliable"
        ]
    );
    r.records().map(Result::unwrap).collect()
}

#[test]
fn benchmark_rows_and_determinism() {
    let sweep = [
        "--grid",
        "4",
        "--horizons",
        "2,4",
        "--fleets",
        "2,3",
        "--fleet-size",
        "2",
        "--repeats",
        "3",
        "--algorithms",
        "flowdec,shared-first",
    ];
    let a = bench(&sweep);
    assert_eq!(a.len(), 2 * 2 * 3 * 2);
    let b = bench(&sweep);
    let values = |rows: &[csv::StringRecord]| -> Vec<String> {
        rows.iter()
            .map(|r| format!("{}|{}|{}", &r[5], &r[6], &r[8]))
            .collect()
    };
    assert_eq!(values(&a), values(&b));
    assert_eq!(
        bench(&[
            "--grid",
            "3x2",
            "--horizons",
            "2",
            "--fleets",
            "1",
            "--fleet-size",
            "1"
        ])
        .len(),
        1
    );
}

#[test]
fn benchmark_with_oracle_fills_ratios() {
    let rows = bench(&[
        "--grid",
        "3",
        "--horizons",
        "2",
        "--fleets",
        "2,3",
        "--fleet-size",
        "1",
        "--repeats",
        "4",
        "--with-oracle",
        "--parallel",
    ]);
    assert_eq!(rows.len(), 8);
    for r in &rows {
        let f: f64 = r[1].parse().unwrap();
        let ratio: f64 = r[10].parse().unwrap();
        assert!(ratio >= f / (2.0 * f - 1.0) - 1e-9);
        assert_eq!(&r[11], "false");
    }
}

#[test]
fn simulate_writes_report_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("sim.json");
    let csv_path = dir.path().join("sim.csv");
    let out = flowdec(&[
        "simulate",
        "--rows",
        "3",
        "--cols",
        "3",
        "--horizon",
        "3",
        "--fleets",
        "2",
        "--fleet-size",
        "1",
        "--objects",
        "2",
        "--steps",
        "5",
        "--planner",
        "flowdec",
        "--out",
        p(&json_path),
        "--csv",
        p(&csv_path),
    ]);
    assert_eq!(code(&out), 0);
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(report["planner"], "flowdec");
    assert_eq!(report["records"].as_array().unwrap().len(), 5);
    let mut r = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(r.records().count(), 5);
}
