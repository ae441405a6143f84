use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hypermatch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypermatch")).args(args).output().expect("spawn")
}

fn record(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn version_names_the_generator() {
    let out = hypermatch(&["--version"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("chacha8/v1"));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(hypermatch(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(hypermatch(&["gen", "gnp", "-n", "5", "-r", "2", "-p", "0.5", "--out", "x.json"]).status.code(), Some(64));
    assert_eq!(hypermatch(&[]).status.code(), Some(64));
}

#[test]
fn core_errors_and_budgets() {
    let dir = tempfile::tempdir().unwrap();
    let out = hypermatch(&["gen", "complete", "-n", "2", "-r", "3", "--out", &p(dir.path(), "g.json")]);
    assert_eq!(out.status.code(), Some(1));
    let rec = record(&out);
    assert_eq!(rec["exit_code"], 1);
    assert!(rec["error"].as_str().unwrap().contains("r <= n"));

    let out = hypermatch(&["afl-verify", "-n", "8", "-r", "2", "-q", "2", "--budget", "1000"]);
    assert_eq!(out.status.code(), Some(2));

    let out = hypermatch(&["match", "--graph", &p(dir.path(), "missing.json")]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn generation_is_seed_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (p(dir.path(), "a.json"), p(dir.path(), "b.json"), p(dir.path(), "c.json"));
    for (path, seed) in [(&a, "7"), (&b, "7"), (&c, "8")] {
        let out = hypermatch(&["gen", "gnp", "-n", "30", "-r", "3", "-p", "0.2", "--seed", seed, "--out", path]);
        assert_eq!(out.status.code(), Some(0));
        let rec = record(&out);
        assert_eq!(rec["seeds"]["seed"], seed.parse::<u64>().unwrap());
        assert_eq!(rec["prng"], "chacha8/v1");
        assert_eq!(rec["outputs"][0], path.as_str());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn text_and_json_graphs_agree() {
    let dir = tempfile::tempdir().unwrap();
    let (json, text) = (p(dir.path(), "g.json"), p(dir.path(), "g.txt"));
    for path in [&json, &text] {
        assert!(hypermatch(&["gen", "gnp", "-n", "20", "-r", "2", "-p", "0.3", "--seed", "3", "--out", path]).status.success());
    }
    let sizes: Vec<Value> = [&json, &text].iter().map(|g| record(&hypermatch(&["match", "--graph", g]))["result"]["size"].clone()).collect();
    assert_eq!(sizes[0], sizes[1]);
    let first = std::fs::read_to_string(&text).unwrap();
    assert!(first.lines().next().unwrap().split_whitespace().count() >= 2);
}

#[test]
fn colour_and_match_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let (g, c, m) = (p(dir.path(), "g.json"), p(dir.path(), "c.json"), p(dir.path(), "m.json"));
    assert!(hypermatch(&["gen", "complete", "-n", "9", "-r", "2", "--out", &g]).status.success());
    let rec = record(&hypermatch(&["colour", "extremal", "-n", "9", "-r", "2", "-q", "2", "--weights", "1,2", "--out", &c]));
    assert_eq!(rec["result"]["block_sizes"], serde_json::json!([3, 6]));
    let rec = record(&hypermatch(&["match", "--graph", &g, "--colouring", &c, "--out", &m]));
    // colour 1 covers every edge meeting three vertices; colour 2 is K_6
    assert_eq!(rec["result"]["size"], 3);
    let matching: Value = serde_json::from_slice(&std::fs::read(&m).unwrap()).unwrap();
    assert_eq!(matching["edges"].as_array().unwrap().len(), 3);

    // an odd vertex count cannot be split into pairs
    assert_eq!(hypermatch(&["match", "--graph", &g, "--perfect"]).status.code(), Some(1));
    let even = p(dir.path(), "k8.json");
    assert!(hypermatch(&["gen", "complete", "-n", "8", "-r", "2", "--out", &even]).status.success());
    let rec = record(&hypermatch(&["match", "--graph", &even, "--perfect"]));
    assert_eq!(rec["result"]["perfect"], true);
    assert_eq!(rec["result"]["size"], 4);
}

#[test]
fn family_tools() {
    let dir = tempfile::tempdir().unwrap();
    let (f, s) = (p(dir.path(), "f.json"), p(dir.path(), "s.json"));
    assert!(hypermatch(&["gen", "family", "-n", "7", "-k", "3", "--beta", "0.3", "--seed", "2", "--out", &f]).status.success());
    let rec = record(&hypermatch(&["shift", "--family", &f, "--out", &s]));
    assert_eq!(rec["result"]["shifted"], true);
    let rec = record(&hypermatch(&["shadow-verify", "--family", &s, "-s", "2", "-b", "1"]));
    assert_eq!(rec["exit_code"], 0);
    assert_eq!(rec["result"]["pass"], true);
    let star = p(dir.path(), "star.json");
    assert!(hypermatch(&["gen", "star", "-n", "9", "-k", "3", "-t", "2", "--out", &star]).status.success());
    let rec = record(&hypermatch(&["cover", "--family", &star, "-s", "3", "-c", "1"]));
    assert_eq!(rec["exit_code"], 0);
}

#[test]
fn empty_sweep_writes_a_header() {
    let dir = tempfile::tempdir().unwrap();
    let (cfg, out) = (p(dir.path(), "cfg.json"), p(dir.path(), "out.csv"));
    std::fs::write(&cfg, "[]").unwrap();
    let rec = record(&hypermatch(&["sweep", "--config", &cfg, "--out", &out]));
    assert_eq!(rec["exit_code"], 0);
    assert_eq!(rec["result"]["runs"], 0);
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 1);
    assert!(csv.starts_with("index,command,seed"));
}

#[test]
fn malformed_sweep_exits_65() {
    let dir = tempfile::tempdir().unwrap();
    let (cfg, out) = (p(dir.path(), "cfg.json"), p(dir.path(), "out.csv"));
    std::fs::write(&cfg, r#"[{"command": "match", "args": {}}, {"args": {"n": 3}}]"#).unwrap();
    let res = hypermatch(&["sweep", "--config", &cfg, "--out", &out]);
    assert_eq!(res.status.code(), Some(65));
    assert!(record(&res)["error"].as_str().unwrap().contains('1'));

    std::fs::write(&cfg, "{not json").unwrap();
    assert_eq!(hypermatch(&["sweep", "--config", &cfg, "--out", &out]).status.code(), Some(65));
}

#[test]
fn sweep_runs_every_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (cfg, out) = (p(dir.path(), "cfg.json"), p(dir.path(), "out.csv"));
    let graph = p(dir.path(), "g-{seed}.json");
    let config = serde_json::json!([
        {"command": "gen gnp", "args": {"n": 12, "r": 2, "p": 0.4, "out": graph}, "seeds": {"from": 1, "to": 3}},
        {"command": "discrepancy", "args": {"n": 30, "r": 2, "p1": 0.3, "p2": 0.5, "mu": "1/5"}, "seeds": [4]},
        {"command": "gen complete", "args": {"n": 2, "r": 3, "out": p(dir.path(), "bad.json")}},
    ]);
    std::fs::write(&cfg, config.to_string()).unwrap();
    let run = |threads: &str| {
        let rec = record(&hypermatch(&["sweep", "--config", &cfg, "--out", &out, "--threads", threads]));
        (rec, std::fs::read_to_string(&out).unwrap())
    };
    let (rec, csv) = run("1");
    assert_eq!(rec["exit_code"], 0);
    assert_eq!(rec["result"]["runs"], 5);
    assert_eq!(rec["result"]["failures"], 1);
    assert_eq!(csv.lines().count(), 6);
    for seed in 1..=3 {
        assert!(dir.path().join(format!("g-{seed}.json")).exists());
    }
    let (_, again) = run("4");
    assert_eq!(csv, again);
}
