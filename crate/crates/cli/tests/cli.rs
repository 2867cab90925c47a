use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn toroshrink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toroshrink"))
        .args(args)
        .env_remove("TOROSHRINK_HORIZON")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json", "--deterministic"]);
    let o = toroshrink(&all);
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(&o)))
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("toroshrink-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn link_info() {
    let hopf = scratch("hopf.pd", "X[1,3,2,4] X[3,1,4,2]\n");
    let v = json(&["link", "info", "--pd", hopf.to_str().unwrap()]);
    let r = &v["results"];
    assert_eq!(r["components"], 2);
    assert_eq!(r["relators"], 2);
    // both crossings are positive
    assert_eq!(r["linking_matrix"], serde_json::json!([[0, 1], [1, 0]]));

    let v = json(&["link", "info", "--builtin", "nm(4,3)"]);
    assert_eq!(v["results"]["components"], 5);

    let empty = scratch("empty.pd", "");
    let o = toroshrink(&["link", "info", "--pd", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("empty diagram"));
}

#[test]
fn milnor_invariants() {
    let signed = |args: &[&str]| -> i64 {
        let v = json(args);
        v["results"]["records"][0]["signed"].as_str().unwrap().parse().unwrap()
    };
    assert_eq!(signed(&["milnor", "--builtin", "whitehead", "--index", "0,0,1,1"]).abs(), 1);
    assert_eq!(signed(&["milnor", "--builtin", "borromean", "--index", "0,1,2"]).abs(), 1);
    assert_eq!(signed(&["milnor", "--builtin", "hopf", "--index", "1,2", "--one-based"]), 1);
    assert_eq!(signed(&["milnor", "--builtin", "hopf", "--index", "0,1"]), 1);
    assert_eq!(toroshrink(&["milnor", "--builtin", "hopf", "--index", "1,2"]).status.code(), Some(3));

    let v = json(&["milnor", "--builtin", "borromean", "--max-len", "3"]);
    // 9 pairs and 27 triples
    assert_eq!(v["results"]["records"].as_array().unwrap().len(), 36);
}

#[test]
fn drf_commands() {
    let v = json(&["drf", "eval", "--link", "nm(3,2)", "--k", "8"]);
    assert_eq!(v["results"]["value"], "10");
    let v = json(&["drf", "orbit", "--link", "bing", "--k", "5", "--repeat", "6"]);
    assert_eq!(v["results"]["values"], serde_json::json!(["5", "4", "3", "2", "1", "0", "0"]));
    let o = toroshrink(&["drf", "eval", "--link", "hopf", "--k", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn shrink_exit_codes() {
    let cases = [
        (r#"{"variant":"periodic","links":[{"builtin":"bing"}]}"#, 0, "shrinks"),
        (r#"{"variant":"periodic","links":[{"builtin":"whitehead"}]}"#, 1, "does_not_shrink"),
        (r#"{"sequence":{"variant":"explicit","links":[{"nm":[2,1]}]},"horizons":{"k_max":8,"m_max":2,"p_max":50}}"#, 2, "unknown"),
    ];
    for (i, (config, code, outcome)) in cases.into_iter().enumerate() {
        let path = scratch(&format!("seq{i}.json"), config);
        let p = path.to_str().unwrap();
        assert_eq!(toroshrink(&["shrink", "--config", p]).status.code(), Some(code), "{config}");
        let v = json(&["shrink", "--config", p]);
        assert_eq!(v["results"]["verdict"]["outcome"], outcome);
    }
    let bad = scratch("bad.json", "{");
    assert_eq!(toroshrink(&["shrink", "--config", bad.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn horizon_override() {
    let path = scratch("explicit.json", r#"{"variant":"explicit","links":[{"nm":[2,1]}]}"#);
    let p = path.to_str().unwrap();
    let run_env = |value: &str| {
        Command::new(env!("CARGO_BIN_EXE_toroshrink"))
            .args(["shrink", "--config", p, "--format", "json", "--deterministic"])
            .env("TOROSHRINK_HORIZON", value)
            .output()
            .unwrap()
    };
    let o = run_env("k_max=3,m_max=1,p_max=5");
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["input"]["horizons"], serde_json::json!({"k_max": 3, "m_max": 1, "p_max": 5}));
    assert_eq!(run_env("k_max=0").status.code(), Some(3));
    // the flag wins over the environment
    let o = Command::new(env!("CARGO_BIN_EXE_toroshrink"))
        .args(["shrink", "--config", p, "--horizon", "2,2,2", "--format", "json"])
        .env("TOROSHRINK_HORIZON", "k_max=3")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["input"]["horizons"]["k_max"], 2);
}

#[test]
fn report() {
    let o = toroshrink(&["report"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(!text.contains("FAIL"));
    assert!(text.contains("14/14 checks passed"));

    let v = json(&["report", "--only", "drf-nm-3-2-at-8"]);
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 1);
    assert_eq!(results[0]["passed"], true);

    let o = toroshrink(&["report", "--only", "no-such-check"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn deterministic_output_is_byte_stable() {
    let args = ["report", "--format", "json", "--deterministic"];
    let a = toroshrink(&args);
    let b = toroshrink(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(!stdout(&a).contains("elapsed_ms"));
    let ids: Vec<String> = serde_json::from_slice::<Value>(&a.stdout).unwrap()["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["id"].as_str().unwrap().to_string())
        .collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    assert!(stdout(&toroshrink(&["report", "--format", "json"])).contains("elapsed_ms"));
}

#[test]
fn help_and_usage_errors() {
    let o = toroshrink(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Exit codes"));
    let o = toroshrink(&["shrink", "--help"]);
    assert!(stdout(&o).contains("TOROSHRINK_HORIZON"));
    assert_eq!(toroshrink(&["link"]).status.code(), Some(3));
}
