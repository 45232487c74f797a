use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn fairshare(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fairshare")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn instance(name: &str, body: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn goods() -> PathBuf {
    instance("goods.json", r#"{"kind":"goods","items":4,"agents":[{"b":"3/5","v":[5,4,3,1]},{"b":"2/5","v":[1,1,1,1]}]}"#)
}

fn chores() -> PathBuf {
    instance(
        "chores.json",
        r#"{"kind":"chores","items":5,"agents":[{"b":"1/2","v":[4,3,2,1,1]},{"b":"1/3","v":[1,2,3,4,5]},{"b":"1/6","v":[2,2,2,2,2]}]}"#,
    )
}

#[test]
fn share_prints_a_rational_string() {
    let g = goods();
    let out = fairshare(&["share", "--kind", "tps-hat", "--agent", "1", g.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["value"], "2");
    let out = fairshare(&["share", "--kind", "mms-hat", "--agent", "0", g.to_str().unwrap()]);
    assert_eq!(json(&out)["partition"], serde_json::json!([[0, 1, 2, 3]]));
}

#[test]
fn fixture_verification_exits_zero() {
    let out = fairshare(&["verify", "--fixture", "chores-2domination-lb"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["holds"], true);
    let out = fairshare(&["verify", "--fixture", "no-such-fixture"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn infeasible_share_exits_two() {
    let path = instance(
        "tight.json",
        r#"{"kind":"goods","items":4,"agents":[{"b":"17/48","v":[1,1,1,1]},{"b":"17/48","v":[1,1,1,1]},{"b":"7/24","v":[1,1,1,1]}]}"#,
    );
    let out = fairshare(&["verify", "--share", "mms-hat", "--factor", "3/5", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["feasible"], false);
    let out = fairshare(&["verify", "--share", "mms-hat", "--factor", "1/2", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn bad_strategy_config_exits_one() {
    let g = goods();
    let out = fairshare(&["bid-play", "--strategies", "bogus", g.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let out = fairshare(&["bid-play", "--strategies", "safe,safe,safe", g.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(fairshare(&["no-such-command"]).status.code(), Some(1));
}

#[test]
fn caps_exit_three() {
    let g = goods();
    let out = fairshare(&["--cap", "3", "verify", "--share", "ps", g.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bid_play_traces_every_round() {
    let g = goods();
    let out = fairshare(&["bid-play", "--strategies", "safe,zero", g.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["rounds"].as_array().unwrap().len(), 4);
    assert_eq!(v["strategies"], serde_json::json!(["safe", "zero"]));
}

#[test]
fn chores_lottery_and_samples_are_reproducible() {
    let c = chores();
    let path = c.to_str().unwrap();
    let a = fairshare(&["assign-chores", "--bobw", "--seed", "9", path]);
    let b = fairshare(&["assign-chores", "--bobw", "--seed", "9", path]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let full = json(&fairshare(&["assign-chores", "--bobw", path]));
    let total = full["outcomes"].as_array().unwrap().len();
    assert!(total >= 1);
    let det = json(&fairshare(&["assign-chores", path]));
    assert_eq!(det["costs"].as_array().unwrap().len(), 3);
}

#[test]
fn reads_stdin_and_reports_parse_errors() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_fairshare"))
        .args(["exante-goods", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(br#"{"kind":"goods","items":1,"agents":[{"b":"1/2","v":[1]},{"b":"1/2","v":[1]}]}"#)
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["gamma_tilde"].is_string());

    let bad = instance("bad.json", r#"{"kind":"goods","items":1,"agents":[{"b":"0.5","v":[1]}]}"#);
    assert_eq!(fairshare(&["exante-goods", bad.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn other_subcommands_answer() {
    let g = goods();
    let path = g.to_str().unwrap();
    for args in [
        vec!["personalized", "--anchor", "1", path],
        vec!["allocate-goods", path],
        vec!["bid-solve", "--agent", "0", path],
        vec!["fixtures"],
    ] {
        let out = fairshare(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        json(&out);
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let g = goods();
    let gp = g.to_str().unwrap();
    for args in [
        vec!["bid-play", "--strategies", "safe,optimal", "--tiebreak", "random", "--seed", "5", gp],
        vec!["exante-goods", gp],
        vec!["allocate-goods", gp],
        vec!["verify", "--fixture", "lookahead"],
    ] {
        let a = fairshare(&args);
        let b = fairshare(&args);
        assert_eq!(a.status.code(), b.status.code(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
