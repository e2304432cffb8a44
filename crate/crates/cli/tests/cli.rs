use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use clap::Parser;
use phasedamp::io::{channel_to_value, write_channel, write_channel_csv};
use phasedamp::{random_channel, CMatrix, ChannelMatrix, Complex64};
use phasedamp_cli::{run, RunConfig};
use serde_json::Value;

fn qutrit(alpha: f64) -> CMatrix {
    let i = Complex64::i();
    let a = Complex64::from(alpha);
    let one = Complex64::from(1.0);
    CMatrix::from_row_slice(3, 3, &[one, i * a, -i * a, -i * a, one, a, i * a, a, one])
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

fn in_process(args: &[&str]) -> (Value, u8) {
    let config = RunConfig::try_parse_from(std::iter::once("phasedamp").chain(args.iter().copied())).unwrap();
    let out = run(&config).unwrap();
    (serde_json::from_str(&out.output).unwrap(), out.status)
}

fn binary(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_phasedamp"))
        .args(args)
        .env_clear()
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    if let Some(text) = stdin {
        pipe.write_all(text.as_bytes()).unwrap();
    }
    drop(pipe);
    child.wait_with_output().unwrap()
}

#[test]
fn analyze_reports_the_qutrit_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "qutrit.json", &write_channel(&qutrit(0.4)));
    let (v, status) = in_process(&["analyze", &path]);
    assert_eq!(status, 0);
    let rec = &v["records"][0];
    assert_eq!(rec["markov"]["verdict"], "NonMarkovian");
    assert_eq!(rec["markov"]["failing_nu"], 2);
    let lam = rec["markov"]["min_eigenvalue"].as_f64().unwrap();
    assert!((lam - (1.0 - 1.2f64.sqrt())).abs() < 1e-9);
    assert_eq!(rec["rank"], 3);
}

#[test]
fn analyze_all_ones_channel() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "ones.json", &write_channel(ChannelMatrix::identity(4).matrix()));
    let (v, _) = in_process(&["analyze", &path]);
    let rec = &v["records"][0];
    assert_eq!(rec["markov"]["verdict"], "Markovian");
    assert_eq!(rec["extremality"]["verdict"], "Extremal");
    assert_eq!(rec["extremality"]["non_ru_certificate"], false);
    let blocks = rec["dfs"]["blocks"].as_array().unwrap();
    assert_eq!(blocks.len(), 1);
    assert_eq!(blocks[0]["dimension"], 4);
}

#[test]
fn analyze_is_deterministic_and_ordered_by_name() {
    let dir = tempfile::tempdir().unwrap();
    for (i, name) in ["c.json", "a.json", "b.csv"].iter().enumerate() {
        let d = random_channel(4, 2, i as u64).unwrap();
        let body = if name.ends_with(".csv") { write_channel_csv(d.matrix()) } else { write_channel(d.matrix()) };
        write(dir.path(), name, &body);
    }
    let root = dir.path().display().to_string();
    let first = binary(&["analyze", &root, "--seed", "3"], None);
    let second = binary(&["analyze", &root, "--seed", "3"], None);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let v: Value = serde_json::from_slice(&first.stdout).unwrap();
    let names: Vec<String> = v["records"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| Path::new(r["input"].as_str().unwrap()).file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    assert_eq!(names, ["a.json", "b.csv", "c.json"]);
    assert_eq!(v["config"]["seed"], 3);
}

#[test]
fn stdin_and_stdout_dash() {
    let out = binary(&["markov", "-", "-o", "-"], Some(&write_channel(&qutrit(0.5))));
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "NonMarkovian");

    let csv = "1, 0.5+0.1i\n0.5-0.1i, 1\n";
    let out = binary(&["markov", "-"], Some(csv));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "Markovian");
}

#[test]
fn output_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out.json").display().to_string();
    let out = binary(&["generate", "--dimension", "3", "--rank", "2", "-o", &target], None);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(v, channel_to_value(random_channel(3, 2, 0).unwrap().matrix()));
}

#[test]
fn exit_codes_distinguish_failures() {
    let ragged = "1, 0.9\n0.9, 1, 0\n";
    assert_eq!(binary(&["validate", "-"], Some(ragged)).status.code(), Some(3));

    let invalid = "1, 2\n2, 1\n";
    let out = binary(&["validate", "-"], Some(invalid));
    assert_eq!(out.status.code(), Some(4));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["valid"], false);

    let malformed = r#"{"dimension": 5, "matrix": [[[1, 0]]]}"#;
    let out = binary(&["markov", "-"], Some(malformed));
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension"));

    assert_eq!(binary(&["markov", "/nonexistent/channel.json"], None).status.code(), Some(1));
    assert_eq!(binary(&["markov", "-", "--nu-max", "1"], Some(invalid)).status.code(), Some(2));
}

#[test]
fn environment_overrides_flags() {
    let out = Command::new(env!("CARGO_BIN_EXE_phasedamp"))
        .args(["generate", "--dimension", "3", "--rank", "3"])
        .env_clear()
        .env("PHASEDAMP_SEED", "11")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v, channel_to_value(random_channel(3, 3, 11).unwrap().matrix()));
}

#[test]
fn repair_is_reported() {
    let nudged = "1.0000001, 0.3\n0.3, 1\n";
    let out = binary(&["markov", "-"], Some(nudged));
    assert_eq!(out.status.code(), Some(4));
    let out = binary(&["markov", "-", "--repair"], Some(nudged));
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let kinds: Vec<&str> = v["warnings"].as_array().unwrap().iter().filter_map(|w| w["kind"].as_str()).collect();
    assert!(kinds.contains(&"repaired"), "{v}");
}

#[test]
fn symmetric_then_dfs() {
    let spec = r#"{"qubits": 2, "vectors": [[[1,0],[0,0]], [[0.6,0],[0.8,0]], [[0,0],[0,1]]]}"#;
    let out = binary(&["symmetric", "-"], Some(spec));
    assert!(out.status.success());
    let channel = String::from_utf8(out.stdout).unwrap();
    let out = binary(&["dfs", "-", "--qubits", "2"], Some(&channel));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let blocks: Vec<Value> = v["blocks"].as_array().unwrap().iter().map(|b| b["indices"].clone()).collect();
    assert_eq!(blocks, vec![serde_json::json!([0]), serde_json::json!([1, 2]), serde_json::json!([3])]);
    assert_eq!(v["permutation_invariant"], true);
}

#[test]
fn simulate_and_extremal_agree() {
    let (sim, _) = in_process(&["simulate", "--example"]);
    assert_eq!(sim["extremality"]["verdict"], "Extremal");
    assert_eq!(sim["extremality"]["non_ru_certificate"], true);
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "sim.json", &sim["channel"].to_string());
    let (ext, _) = in_process(&["extremal", &path]);
    assert_eq!(ext["volume"], sim["extremality"]["volume"]);
}

#[test]
fn text_output_is_plain() {
    let out = binary(&["extremal", "-", "--output", "text"], Some(&write_channel(&qutrit(0.2))));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("verdict: NotApplicable"), "{text}");
}
