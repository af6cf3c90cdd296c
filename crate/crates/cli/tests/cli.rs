use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_asymcone"));
    c.env_remove("ASYMCONE_OUT_DIR");
    c
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

const TRIANGLE: &str =
    r#"{"points":["e","a","b"],"basepoint":"e","dist":[["0","1","3/2"],["1","0","1"],["3/2","1","0"]]}"#;

#[test]
fn decone_build_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "y.json", TRIANGLE);
    let out = run(&["decone", "build", "--space", "y.json", "--parts", "6", "--out", "x.json"], d);
    assert_eq!(stdout_json(&out)["points"], 7);
    let x: Value = serde_json::from_str(&std::fs::read_to_string(d.join("x.json")).unwrap()).unwrap();
    assert_eq!(x["points"][1], "a@3");
    assert_eq!(x["dist"][0][1], "6");

    let out = run(
        &["decone", "verify", "--space", "y.json", "--parts", "8", "--schedule", "3..8", "--out", "r.csv"],
        d,
    );
    let rows = stdout_json(&out);
    assert_eq!(rows.as_array().unwrap().len(), 6);
    let csv = std::fs::read_to_string(d.join("r.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,gh_upper,window_lo,window_hi"));
    assert!(lines.any(|l| l.starts_with("8,0,")));
}

#[test]
fn fastset_classify() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "p.json", r#"{"rule":"powers:2","horizon":1000000}"#);
    write(d, "t.json", r#"{"rule":"tower:2","horizon":"1000000000000000000000000000000"}"#);
    let p = stdout_json(&run(&["fastset", "classify", "--set", "p.json"], d));
    assert_eq!((p["fast"].as_str(), p["thin"].as_str()), (Some("holds"), Some("fails")));
    let t = stdout_json(&run(&["fastset", "classify", "--set", "t.json"], d));
    assert_eq!(t["thin"], "holds");
    let short = stdout_json(&run(&["fastset", "classify", "--set", "p.json", "--horizon", "100"], d));
    assert_eq!(short["elements"], "6");
}

#[test]
fn ghdist_modes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "a.json", TRIANGLE);
    write(d, "b.json", r#"{"points":["e","a"],"basepoint":"e","dist":[["0","2"],["2","0"]]}"#);
    let b = stdout_json(&run(&["ghdist", "--a", "a.json", "--b", "b.json"], d));
    assert!(b.get("exact").is_none());
    let e = stdout_json(&run(&["ghdist", "--a", "a.json", "--b", "b.json", "--mode", "exact", "--pointed"], d));
    assert_eq!(e["exact"], "1/2");
    let same = stdout_json(&run(&["ghdist", "--a", "a.json", "--b", "a.json", "--mode", "exact"], d));
    assert_eq!((same["lower"].as_str(), same["upper"].as_str()), (Some("0"), Some("0")));
}

#[test]
fn limit_eval_dichotomy() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "s.json", r#"{"rule":"alternate","values":[-1,1]}"#);
    write(d, "even.json", r#"{"kind":"evens","horizon":10000}"#);
    write(d, "odd.json", r#"{"kind":"odds","horizon":10000}"#);
    write(d, "cof.json", r#"{"kind":"cofinite","horizon":10000}"#);
    let ev = stdout_json(&run(&["limit", "eval", "--seq", "s.json", "--base", "even.json"], d));
    assert_eq!(ev["value"], "1");
    let od = stdout_json(&run(&["limit", "eval", "--seq", "s.json", "--base", "odd.json"], d));
    assert_eq!(od["value"], "-1");
    let co = stdout_json(&run(&["limit", "eval", "--seq", "s.json", "--base", "cof.json", "--eps", "1/1000"], d));
    assert_eq!(co["result"], "undetermined");
    assert_eq!(co["candidates"], serde_json::json!(["-1", "1"]));
    let zero = run(&["limit", "eval", "--seq", "s.json", "--base", "cof.json", "--eps", "0"], d);
    assert_eq!(zero.status.code(), Some(2));
}

#[test]
fn slowuf_demo_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = run(
        &["slowuf", "demo", "--seed", "factorial", "--max-n", "12", "--L", "2,3/2,5/4,9/8", "--out", "demo.json"],
        d,
    );
    let summary = stdout_json(&out);
    assert_eq!(summary["worst"], serde_json::json!(["2", "3/2", "5/4", "9/8"]));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(d.join("demo.json")).unwrap()).unwrap();
    let entries = report["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 4);
    assert_eq!(entries[0]["dropped"], 1);
    for e in entries {
        for w in e["not_fast"]["witnesses"].as_array().unwrap() {
            assert!(w["ratio"].is_string() && w["ok"] == true);
        }
    }
}

#[test]
fn malformed_input_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "bad.json", "{\"points\": [\"e\"],\n  \"basepoint\": }");
    write(d, "ok.json", TRIANGLE);
    let out = run(&["ghdist", "--a", "bad.json", "--b", "ok.json"], d);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json") && err.contains("line 2"), "{err}");

    write(d, "tri.json", r#"{"points":["e","a","b"],"basepoint":"e","dist":[["0","1","5"],["1","0","1"],["5","1","0"]]}"#);
    let out = run(&["ghdist", "--a", "tri.json", "--b", "ok.json"], d);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn suite_rejects_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "c.json", r#"{"eps":"0"}"#);
    let out = run(&["suite", "--config", "c.json"], d);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("eps"));
    write(d, "typo.json", r#"{"horizn": 5000}"#);
    assert_eq!(run(&["suite", "--config", "typo.json"], d).status.code(), Some(2));
}

#[test]
fn suite_is_deterministic_and_honours_env() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // The file wins over the flag.
    write(d, "c.json", r#"{"out_dir": "first", "seed": 5}"#);
    let a = run(&["suite", "--config", "c.json", "--out-dir", "ignored"], d);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stdout));
    assert!(!d.join("ignored").exists());
    let b = bin()
        .args(["suite", "--config", "c.json"])
        .env("ASYMCONE_OUT_DIR", d.join("second"))
        .current_dir(d)
        .output()
        .unwrap();
    assert!(b.status.success());
    for f in ["report.json", "report.csv", "convergence.csv"] {
        let x = std::fs::read(d.join("first").join(f)).unwrap();
        let y = std::fs::read(d.join("second").join(f)).unwrap();
        assert_eq!(x, y, "{f} differs");
    }
    let report: Value =
        serde_json::from_slice(&std::fs::read(d.join("first/report.json")).unwrap()).unwrap();
    let statuses: Vec<&str> = report.as_array().unwrap().iter().map(|c| c["status"].as_str().unwrap()).collect();
    assert_eq!(statuses, vec!["pass"; 10]);
}

#[test]
fn suite_with_two_parts_warns() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = run(&["suite", "--parts", "2", "--out-dir", "o"], d);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("vacuous"));
    let report: Value = serde_json::from_slice(&std::fs::read(d.join("o/report.json")).unwrap()).unwrap();
    assert!(report[0]["witnesses"]["warning"].is_string());
}
