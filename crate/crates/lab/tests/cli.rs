//! End-to-end checks of the binary: exit codes, JSON output, file formats,
//! config injection, and record replay through real process boundaries.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use glasscut_core::parisi::{parisi_functional, Method, RecursionOpts, RsbProfile};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_glasscut"))
}

fn tdir(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("glasscut-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn parisi_eval_reports_known_value() {
    let out = run(&["parisi", "eval", "--k", "1", "--q", "0,1", "--m", "1", "--beta", "1"]);
    let v = stdout_json(&out);
    let expected = 0.25 + (2.0f64).ln();
    assert!((v["value"].as_f64().unwrap() - expected).abs() < 1e-6, "{v}");
    assert_eq!(v["profile"]["k"].as_u64(), Some(1));
    assert!(v["diagnostics"]["elapsed_ms"].is_number());
}

#[test]
fn stochastic_solver_without_seed_is_usage_error() {
    let dir = tdir("noseed");
    let g = dir.join("g.txt");
    let out = run(&[
        "graph", "gen", "--model", "er", "--n", "8", "--m", "12", "--seed", "4", "--out",
        g.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = bin()
        .args(["cut", "solve", "--in", g.to_str().unwrap()])
        .args(["--objective", "max", "--constraint", "free", "--solver", "local"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = run(&["parisi", "eval", "--k", "1", "--q", "0,1", "--m", "1", "--beta", "1", "--nope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn short_beta_ladder_is_usage_error() {
    let out = run(&["parisi", "pstar", "--betas", "2,4", "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_input_file_is_runtime_error() {
    let out = run(&[
        "cut", "solve", "--in", "/nonexistent/graph.txt", "--objective", "max", "--constraint",
        "free", "--solver", "exact",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn graph_file_round_trip_with_exact_and_spectral() {
    let dir = tdir("roundtrip");
    let g = dir.join("g.txt");
    let out = run(&[
        "graph", "gen", "--model", "reg", "--n", "16", "--gamma", "3", "--seed", "3", "--out",
        g.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let exact = stdout_json(&run(&[
        "cut", "solve", "--in", g.to_str().unwrap(), "--objective", "max", "--constraint",
        "bisection", "--solver", "exact",
    ]));
    let value = exact["value"].as_f64().unwrap();
    assert!(value > 0.0 && value <= 24.0, "{exact}");

    let spectral = stdout_json(&run(&[
        "cut", "solve", "--in", g.to_str().unwrap(), "--objective", "max", "--constraint",
        "bisection", "--solver", "spectral", "--seed", "1",
    ]));
    let lo = spectral["certificate"][0].as_f64().unwrap();
    let hi = spectral["certificate"][1].as_f64().unwrap();
    assert!(lo <= value && value <= hi, "exact {value} outside [{lo}, {hi}]");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn stdin_input_matches_file_input() {
    let dir = tdir("stdin");
    let g = dir.join("g.txt");
    assert_eq!(
        run(&[
            "graph", "gen", "--model", "pois", "--n", "10", "--gamma", "2", "--seed", "8",
            "--out", g.to_str().unwrap(),
        ])
        .status
        .code(),
        Some(0)
    );
    let from_file = stdout_json(&run(&[
        "cut", "solve", "--in", g.to_str().unwrap(), "--objective", "min", "--constraint",
        "bisection", "--solver", "exact",
    ]));

    let mut child = bin()
        .args(["cut", "solve", "--in", "-", "--objective", "min", "--constraint", "bisection"])
        .args(["--solver", "exact"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.as_mut().unwrap().write_all(&std::fs::read(&g).unwrap()).unwrap();
    let out = child.wait_with_output().unwrap();
    let from_stdin = stdout_json(&out);
    assert_eq!(from_file["value"], from_stdin["value"]);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn sbm_gen_emits_a_plain_graph_file() {
    let dir = tdir("sbm");
    let g = dir.join("s.txt");
    let out = run(&[
        "graph", "gen", "--model", "sbm", "--n", "8", "--a", "6", "--b", "2", "--seed", "1",
        "--out", g.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    // The file is the bare edge list; planted labels never leave the binary.
    let mut reader = std::io::BufReader::new(std::fs::File::open(&g).unwrap());
    let parsed = glasscut::gformat::read_graph(&mut reader).unwrap();
    assert_eq!(parsed.n(), 8);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn scaling_artifacts_replay_and_detect_tampering() {
    let dir = tdir("artifacts");
    let jsonl = dir.join("run.jsonl");
    let out = run(&[
        "exp", "scaling", "--ensemble", "regular", "--gammas", "3", "--n", "16", "--replicas",
        "2", "--solver", "exact", "--seed", "21", "--out", jsonl.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&jsonl).unwrap();
    assert_eq!(text.lines().count(), 6, "2 replicas x 3 problems");
    let csv = std::fs::read_to_string(dir.join("run.jsonl.summary.csv")).unwrap();
    assert!(csv.lines().count() >= 4, "header plus one row per cell: {csv}");

    let ok = run(&["exp", "replay", "--in", jsonl.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let one = run(&["exp", "replay", "--in", jsonl.to_str().unwrap(), "--line", "3"]);
    assert_eq!(one.status.code(), Some(0));

    let mut lines: Vec<serde_json::Value> =
        text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    lines[0]["value"] = serde_json::json!(lines[0]["value"].as_f64().unwrap() + 1.0);
    let tampered = dir.join("tampered.jsonl");
    let mut f = std::fs::File::create(&tampered).unwrap();
    for l in &lines {
        writeln!(f, "{l}").unwrap();
    }
    let bad = run(&["exp", "replay", "--in", tampered.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn config_fills_missing_flags_and_explicit_flags_win() {
    let dir = tdir("config");
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "# defaults for the eval below\nbeta=2\nmethod=recursion\n").unwrap();

    let rec = |beta: f64| {
        let p = RsbProfile::constant(beta, 0.0).unwrap();
        parisi_functional(&p, &Method::Recursion(RecursionOpts::default_for(beta))).unwrap()
    };

    let from_config = stdout_json(&run(&[
        "parisi", "eval", "--config", cfg.to_str().unwrap(), "--k", "1", "--q", "0,1", "--m", "0",
    ]));
    assert!((from_config["value"].as_f64().unwrap() - rec(2.0)).abs() < 1e-9);

    let explicit = stdout_json(&run(&[
        "parisi", "eval", "--config", cfg.to_str().unwrap(), "--k", "1", "--q", "0,1", "--m", "0",
        "--beta", "1",
    ]));
    assert!((explicit["value"].as_f64().unwrap() - rec(1.0)).abs() < 1e-9);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn malformed_config_is_usage_error() {
    let dir = tdir("badconfig");
    let cfg = dir.join("bad.cfg");
    std::fs::write(&cfg, "this line has no equals sign\n").unwrap();
    let out = run(&[
        "parisi", "eval", "--config", cfg.to_str().unwrap(), "--k", "1", "--q", "0,1", "--m", "1",
        "--beta", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}
