use std::process::{Command, Output};

use serde_json::Value;

fn orlicz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orlicz"))
        .args(args)
        .env_remove("ORLICZ_CONFIG")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", stderr(out));
    serde_json::from_str(&stdout(out)).unwrap()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn triangle_moment() {
    let v = json(&orlicz(&["moment", "--poly", "[[0,0],[1,0],[0,1]]"]));
    let m: Vec<f64> = v.as_array().unwrap().iter().map(num).collect();
    assert_eq!(m.len(), 2);
    assert!(m.iter().all(|x| (x - 1.0 / 6.0).abs() < 1e-15));
    assert_eq!(stdout(&orlicz(&["moment", "--poly", "[[0,0],[1,0],[0,1]]"])).trim(), "[1.6666666666666666e-1,1.6666666666666666e-1]");
}

#[test]
fn disk_indicator_norm() {
    let v = json(&orlicz(&["norm", "--phi", "power:2", "--indicator", "ball:1", "--dim", "2"]));
    let want = (4.0 * std::f64::consts::PI / 3.0).sqrt();
    assert!((num(&v["orlicz"]) - want).abs() < 1e-9);
    assert!((num(&v["indicator_closed_form"]) - want).abs() < 1e-12);
    assert!((num(&v["modular"]) - std::f64::consts::PI / 3.0).abs() < 1e-14);
}

#[test]
fn young_subcommands() {
    let v = json(&orlicz(&["young", "conjugate", "--family", "power", "--p", "3"]));
    assert_eq!(num(&v["q"]), 1.5);
    assert_eq!(v["provenance"], "closed_form");

    let v = json(&orlicz(&["young", "delta2", "--family", "exp"]));
    assert_eq!(v["holds"], false);
    let v = json(&orlicz(&["young", "delta2", "--family", "power", "--p", "3"]));
    assert_eq!(v["holds"], true);

    let v = json(&orlicz(&["young", "eval", "--family", "power", "--p", "2", "--t", "0"]));
    assert_eq!(num(&v["value"]), 0.0);
    let v = json(&orlicz(&["young", "eval", "--phi", "power:2", "--t", "3"]));
    assert_eq!(num(&v["value"]), 4.5);
}

#[test]
fn passing_battery_exits_zero() {
    let out = orlicz(&["verify", "lemma8"]);
    assert!(out.status.success());
    assert!(stderr(&out).starts_with("PASS lemma8"));
}

#[test]
fn failing_battery_prints_counterexample() {
    let out = orlicz(&["verify", "continuity", "--depth", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.starts_with("FAIL continuity"), "{err}");
    let line = err.lines().find_map(|l| l.strip_prefix("first counterexample: ")).unwrap();
    let v: Value = serde_json::from_str(line).unwrap();
    assert_eq!(v["depth"], 3);
}

#[test]
fn bad_input_exits_nonzero() {
    assert!(!orlicz(&["verify", "nope"]).status.success());
    let out = orlicz(&["young", "eval", "--phi", "power:0.5", "--t", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!stderr(&out).is_empty());
}

#[test]
fn config_file_from_env() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "cases = 2\nseed = 3\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_orlicz"))
        .args(["verify", "lemma3"])
        .env("ORLICZ_CONFIG", &path)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(stdout(&out), stdout(&orlicz(&["verify", "lemma3", "--cases", "2", "--seed", "3"])));
    assert_eq!(stdout(&out).lines().count(), 3);

    // flags win over the file
    let out = Command::new(env!("CARGO_BIN_EXE_orlicz"))
        .args(["verify", "lemma3", "--cases", "4"])
        .env("ORLICZ_CONFIG", &path)
        .output()
        .unwrap();
    assert_eq!(stdout(&out).lines().count(), 5);

    std::fs::write(&path, "bogus = 1\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_orlicz"))
        .args(["verify", "lemma8"])
        .env("ORLICZ_CONFIG", &path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_file_and_json_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let out = orlicz(&["verify", "lemma15", "--J", "10", "--out", path.to_str().unwrap()]);
    let summary = json(&out);
    assert_eq!(summary["pass"], true);
    let table = std::fs::read_to_string(&path).unwrap();
    assert_eq!(table.lines().count(), 11);
}

#[test]
fn counterexample_table() {
    let out = orlicz(&["counterexample", "--phi", "power:2", "--xi", "pow:4", "--J", "5"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("j,index,beta,beta_prime,c,r"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5);
    let c: Vec<f64> = rows.iter().map(|r| r.split(',').nth(4).unwrap().parse().unwrap()).collect();
    assert!(c.windows(2).all(|w| w[1] > w[0] + 2.0));
}

#[test]
fn psi_of_simple_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.json");
    let h = r#"{"dim":2,"terms":[{"value":2.0,"region":{"dim":2,"parts":[{"kind":"polytope","dim":2,"vertices":[[0,0],[1,0],[0,1]]}]}}]}"#;
    std::fs::write(&path, h).unwrap();
    let out = orlicz(&["psi", "--xi", "pow:3", "--simple", path.to_str().unwrap()]);
    let v = json(&out);
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 2);
    assert!(arr.iter().all(|x| (num(x) - 8.0 / 6.0).abs() < 1e-14), "{v}");
}
