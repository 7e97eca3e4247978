use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn peelkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_peelkit")).args(args).output().expect("binary runs")
}

fn json_run(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = peelkit(&full);
    let body: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    });
    (out.status.code().expect("exit code"), body)
}

fn write_points(dir: &TempDir, name: &str, dim: usize, rows: &[&[&str]]) -> PathBuf {
    let points: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect();
    let body = serde_json::json!({ "dim": dim, "points": points });
    let path = dir.path().join(name);
    std::fs::write(&path, body.to_string()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn count_convex_pentagon() {
    let dir = TempDir::new().unwrap();
    let f = write_points(&dir, "c.json", 2, &[&["0", "0"], &["1", "1"], &["2", "4"], &["3", "9"], &["4", "16"]]);
    let (code, body) = json_run(&["count", s(&f)]);
    assert_eq!(code, 0);
    assert_eq!(body["outputs"]["count"], "120");
}

#[test]
fn count_with_oracle_and_enumeration() {
    let dir = TempDir::new().unwrap();
    let f = write_points(&dir, "t.json", 2, &[&["0", "0"], &["6", "0"], &["0", "6"], &["1", "1"]]);
    let (code, body) = json_run(&["count", s(&f), "--naive", "--enumerate", "3"]);
    assert_eq!(code, 0);
    assert_eq!(body["outputs"]["count"], "18");
    assert_eq!(body["outputs"]["naive_agreement"], true);
    assert_eq!(body["outputs"]["sequences"], serde_json::json!([[0, 1, 2, 3], [0, 1, 3, 2], [0, 2, 1, 3]]));
}

#[test]
fn degenerate_input_exits_two() {
    let dir = TempDir::new().unwrap();
    let f = write_points(&dir, "d.json", 2, &[&["0", "0"], &["1", "1"], &["2", "2"], &["0", "1"]]);
    let (code, body) = json_run(&["count", s(&f)]);
    assert_eq!(code, 2);
    assert_eq!(body["error"]["kind"], "input");
    assert!(body["error"]["message"].as_str().unwrap().contains("[0, 1, 2]"));
    let text = peelkit(&["count", s(&f)]);
    assert_eq!(text.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&text.stderr).contains("[0, 1, 2]"));
}

#[test]
fn missing_file_exits_two() {
    let (code, _) = json_run(&["count", "/nonexistent/points.json"]);
    assert_eq!(code, 2);
}

#[test]
fn state_budget_from_environment() {
    let dir = TempDir::new().unwrap();
    let f = write_points(&dir, "c.json", 2, &[&["0", "0"], &["1", "1"], &["2", "4"], &["3", "9"], &["4", "16"]]);
    let out = Command::new(env!("CARGO_BIN_EXE_peelkit"))
        .args(["count", s(&f)])
        .env("PEELKIT_STATE_BUDGET", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let bad = Command::new(env!("CARGO_BIN_EXE_peelkit"))
        .args(["count", s(&f)])
        .env("PEELKIT_STATE_BUDGET", "lots")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn depth_examples() {
    let dir = TempDir::new().unwrap();
    let gale = dir.path().join("g.json");
    assert_eq!(json_run(&["generate", "gale", "--d", "2", "--m", "2", "--out", s(&gale)]).0, 0);
    let (code, body) = json_run(&["depth", s(&gale), "--origin", "0,0", "--oracle"]);
    assert_eq!(code, 0);
    assert_eq!(body["outputs"]["depth"], 2);
    assert_eq!(body["outputs"]["oracle_agreement"], true);

    let one_sided = write_points(&dir, "o.json", 2, &[&["1", "1"], &["2", "3"], &["3", "1"]]);
    assert_eq!(json_run(&["depth", s(&one_sided)]).1["outputs"]["depth"], 0);

    let line = write_points(&dir, "l.json", 1, &[&["-2"], &["-1"], &["1"], &["2"]]);
    assert_eq!(json_run(&["depth", s(&line), "--origin", "0"]).1["outputs"]["depth"], 2);
    assert_eq!(json_run(&["depth", s(&line), "--origin", "-3/2"]).1["outputs"]["depth"], 1);
}

#[test]
fn generate_gale_and_base_set() {
    let dir = TempDir::new().unwrap();
    let gale = dir.path().join("g.json");
    let (code, body) = json_run(&["generate", "gale", "--d", "3", "--m", "2", "--out", s(&gale)]);
    assert_eq!(code, 0);
    assert_eq!(body["outputs"]["points"], 6);
    assert_eq!(body["outputs"]["depth"], 2);

    let base = dir.path().join("b.json");
    let (code, body) = json_run(&["generate", "base-set", "--d", "2", "--m", "3", "--out", s(&base)]);
    assert_eq!(code, 0);
    assert_eq!(body["outputs"]["points"], 7);
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&base).unwrap()).unwrap();
    assert_eq!(file["meta"]["kind"], "base-set");
    assert_eq!(file["points"].as_array().unwrap().len(), 7);
}

#[test]
fn generate_construction_writes_tree() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("c.json");
    let (code, body) = json_run(&["generate", "construction", "--d", "3", "--m", "1", "--n", "8", "--out", s(&out)]);
    assert_eq!(code, 0);
    assert_eq!(body["outputs"]["partition"], serde_json::json!([2, 2, 2, 2]));
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(file["blocks"], serde_json::json!([0, 0, 1, 1, 2, 2, 3, 3]));
    assert_eq!(file["tree"]["child_sizes"], serde_json::json!([2, 2, 2, 2]));
    assert_eq!(file["tree"]["children"].as_array().unwrap().len(), 4);

    let again = dir.path().join("c2.json");
    json_run(&["generate", "construction", "--d", "3", "--m", "1", "--n", "8", "--out", s(&again)]);
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&again).unwrap());

    let (code, _) = json_run(&["generate", "construction", "--d", "3", "--m", "1", "--out", s(&out)]);
    assert_eq!(code, 2);
}

#[test]
fn bounds_examples() {
    let (code, body) = json_run(&["bounds", "--d", "3"]);
    assert_eq!(code, 0);
    assert_eq!(body["outputs"]["optimal_m"], 3);
    assert_eq!(body["outputs"]["theorem1_m"], 3);
    let approx = body["outputs"]["growth_base"]["approx"].as_str().unwrap();
    assert!(approx.starts_with("118.86") && approx.contains("approximate"), "{approx}");

    let (_, body) = json_run(&["bounds", "--d", "3", "--m", "1", "--n", "3"]);
    assert_eq!(body["outputs"]["growth_base"]["enclosure"], serde_json::json!(["256", "256"]));
    assert_eq!(body["outputs"]["bound_value"]["enclosure"], serde_json::json!(["4096", "4096"]));

    let (_, body) = json_run(&["bounds", "--d", "4"]);
    assert_eq!(body["outputs"]["theorem1_m"], 5);

    assert_eq!(json_run(&["bounds", "--d", "2"]).0, 2);
}

#[test]
fn verify_suites() {
    for suite in ["kernel", "peeling", "bounds"] {
        let (code, body) = json_run(&["verify", suite, "--seed", "42"]);
        assert_eq!(code, 0, "{body}");
        let checks = body["outputs"]["checks"].as_array().unwrap();
        assert!(!checks.is_empty());
        assert!(checks.iter().all(|c| c["passed"] == true));
        assert!(body["outputs"]["note"].as_str().unwrap().contains("finite"));
    }
    assert_eq!(json_run(&["verify", "everything"]).0, 2);
}

#[test]
fn plot_construction_and_projection() {
    let dir = TempDir::new().unwrap();
    let planar = dir.path().join("p.json");
    json_run(&["generate", "construction", "--d", "2", "--m", "1", "--n", "9", "--out", s(&planar)]);
    let svg_path = dir.path().join("p.svg");
    assert_eq!(json_run(&["plot", s(&planar), "--out", s(&svg_path)]).0, 0);
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<polyline").count(), 3);
    assert_eq!(svg.matches("<circle").count(), 9);
    assert!(svg.contains("id=\"origin\""));

    let spatial = dir.path().join("s.json");
    json_run(&["generate", "construction", "--d", "3", "--m", "1", "--n", "8", "--out", s(&spatial)]);
    let proj = dir.path().join("s.svg");
    assert_eq!(json_run(&["plot", s(&spatial), "--out", s(&proj), "--axes", "0,2"]).0, 0);
    assert!(std::fs::read_to_string(&proj).unwrap().contains("axes (0, 2)"));
    assert_eq!(json_run(&["plot", s(&spatial), "--out", s(&proj), "--axes", "0,3"]).0, 2);

    let single = write_points(&dir, "one.json", 2, &[&["3", "4"]]);
    let one_svg = dir.path().join("one.svg");
    json_run(&["plot", s(&single), "--out", s(&one_svg)]);
    assert_eq!(std::fs::read_to_string(&one_svg).unwrap().matches("<circle").count(), 1);
}

#[test]
fn text_output_is_readable() {
    let out = peelkit(&["bounds", "--d", "3", "--m", "2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("growth_base: [125, 125]"));
    assert!(text.contains("verdict: pass"));
}
