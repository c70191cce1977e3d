use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

/// Robot walking a chain 0 - 1 - 2 - 3 with waiting allowed everywhere.
const CHAIN: &str = r#"{"robot":0,"states":[0,1,2,3],"initial":0,"edges":[
    [0,0,1],[0,1,1],[1,0,1],[1,1,1],[1,2,2],[2,1,2],[2,2,1],[2,3,1],[3,2,1],[3,3,1]]}"#;

/// Eventually reach region 3, then anything.
const REACH3: &str = r#"{"states":["wait","done"],"initial":["wait"],"finals":["done"],"transitions":[
    {"from":"wait","to":"wait","guard":"true"},
    {"from":"wait","to":"done","guard":{"dnf":[{"pos":[[0,3]]}]}},
    {"from":"done","to":"done","guard":"true"}]}"#;

/// The only accepting state has no way back to itself.
const DEAD_END: &str = r#"{"states":[0,1,2],"initial":[0],"finals":[1],"transitions":[
    {"from":0,"to":1,"guard":"true"},{"from":1,"to":2,"guard":"true"},
    {"from":2,"to":2,"guard":"true"}]}"#;

fn setup() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("chain.json"), CHAIN).unwrap();
    std::fs::write(dir.path().join("reach3.json"), REACH3).unwrap();
    std::fs::write(dir.path().join("dead.json"), DEAD_END).unwrap();
    dir
}

fn stylus(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stylus"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn synth_writes_a_plan() {
    let dir = setup();
    let o = stylus(dir.path(), &["synth", "--wts", "chain.json", "--nba", "reach3.json", "--seed", "3", "--out", "plan.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let plan: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("plan.json")).unwrap()).unwrap();
    // 0 -> 1 -> 2 -> 3 costs 4, then the automaton moves while waiting at 3
    assert_eq!(plan["j_pre"], 5.0);
    assert_eq!(plan["j_suf"], 1.0);
    assert_eq!(plan["prefix"][0]["pts"][0], 0);
    assert_eq!(plan["prefix"].as_array().unwrap().last().unwrap()["buchi"], "done");
}

#[test]
fn synth_prints_to_stdout_and_accepts_bias_modes() {
    let dir = setup();
    for bias in ["uniform", "fixed:done", "sequential"] {
        let o = stylus(dir.path(), &["synth", "--wts", "chain.json", "--nba", "reach3.json", "--bias", bias]);
        assert_eq!(code(&o), 0, "{bias}");
        let plan: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert!(plan["j_total"].as_f64().unwrap() >= 3.0);
    }
}

#[test]
fn exit_codes() {
    let dir = setup();
    let d = dir.path();
    assert_eq!(code(&stylus(d, &["synth", "--wts", "chain.json", "--nba", "dead.json"])), 2);
    assert_eq!(code(&stylus(d, &["synth", "--wts", "chain.json", "--nba", "reach3.json", "--n-pre", "1"])), 3);
    assert_eq!(code(&stylus(d, &["synth", "--wts", "missing.json", "--nba", "reach3.json"])), 4);
    assert_eq!(code(&stylus(d, &["synth", "--wts", "chain.json", "--nba", "reach3.json", "--bias", "fixed:nowhere"])), 4);
    assert_eq!(code(&stylus(d, &["synth", "--wts", "chain.json", "--nba", "reach3.json", "--beta", "2"])), 4);
    assert_eq!(code(&stylus(d, &["synth", "--nba", "reach3.json"])), 4);
    assert_eq!(code(&stylus(d, &["--help"])), 0);
}

#[test]
fn experiments_write_csv() {
    let dir = setup();
    let cfg = r#"{"trials":3,"timing":false,"n_max":[1,500],
        "instances":[{"files":{"wts":["chain.json"],"nba":"reach3.json","name":"chain"}}]}"#;
    std::fs::write(dir.path().join("exp.json"), cfg).unwrap();
    for (cmd, rows) in [("bench", 3), ("success-curve", 2), ("compare-bias", 2), ("oracle-check", 3)] {
        let o = stylus(dir.path(), &[cmd, "--config", "exp.json", "--out", "out.csv"]);
        assert_eq!(code(&o), 0, "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        let csv = std::fs::read_to_string(dir.path().join("out.csv")).unwrap();
        assert_eq!(csv.lines().count(), rows + 1, "{cmd}");
        assert!(csv.lines().nth(1).unwrap().starts_with("chain,"));
    }
    // same config, same bytes
    let a = stylus(dir.path(), &["bench", "--config", "exp.json"]).stdout;
    let b = stylus(dir.path(), &["bench", "--config", "exp.json"]).stdout;
    assert_eq!(a, b);
    std::fs::write(dir.path().join("bad.json"), r#"{"trials":0}"#).unwrap();
    assert_eq!(code(&stylus(dir.path(), &["bench", "--config", "bad.json"])), 4);
}
