use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn lmcf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lmcf")).args(args).env("LMCF_LOG", "error").output().expect("binary runs")
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

#[test]
fn symmetric_neck_angles() {
    let o = lmcf(&["soliton", "angles", "--m", "3", "--a", "1,1,1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    for p in v["phi"].as_array().unwrap() {
        assert!((p.as_f64().unwrap() - PI / 3.0).abs() < 1e-10);
    }
}

#[test]
fn dimension_mismatch_is_an_error() {
    let o = lmcf(&["soliton", "angles", "--m", "4", "--a", "1,1,1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--m 4"));
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(lmcf(&["--help"]).status.code(), Some(0));
    assert_eq!(lmcf(&["soliton", "angles", "--bogus"]).status.code(), Some(1));
    assert_eq!(lmcf(&["flow", "run"]).status.code(), Some(1));
}

#[test]
fn inversion_round_trips() {
    let o = lmcf(&["soliton", "invert", "--family", "expander", "--alpha", "1", "--phi", "0.6,0.7,0.8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(json(&o)["round_trip_error"].as_f64().unwrap() < 1e-6);
    let o = lmcf(&["soliton", "invert", "--phi", "1,1,1.1415926535897931"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--area"));
}

#[test]
fn sample_csv_has_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("neck.csv");
    let o = lmcf(&["soliton", "sample", "--a", "1,2,3", "--count", "11", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[1], "y,x1,x2,x3,re1,im1,re2,im2,re3,im3,theta");
    assert_eq!(lines.len(), 13);
    assert!(lines[2..].iter().all(|l| l.split(',').count() == 11));
}

#[test]
fn residual_and_decay_reports() {
    let o = lmcf(&["soliton", "residual", "--a", "1,2,3"]);
    assert!(json(&o)["residual_order4"].as_f64().unwrap() < 1e-5);
    let o = lmcf(&["soliton", "asymptote", "--a", "1,1,1"]);
    assert!((json(&o)["rate"].as_f64().unwrap() + 1.0).abs() < 0.2);
}

#[test]
fn potential_equation_keeps_linear_data() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.csv");
    let o = lmcf(&["soliton", "u1solve", "--a", "0.5", "--nx", "17", "--ny", "17", "--linear", "0.2,1,-0.5", "--grid", grid.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(json(&o)["max_deviation_from_linear"].as_f64().unwrap() < 1e-8);
    assert_eq!(std::fs::read_to_string(grid).unwrap().lines().count(), 2 + 17 * 17);
}

#[test]
fn missing_ambient_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{ "curve": { "preset": "circle", "radius": 1 }, "horizon": { "t_max": 0.1 } }"#).unwrap();
    let o = lmcf(&["flow", "run", path.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("ambient"), "{}", stderr(&o));
}

#[test]
fn unknown_key_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let text = r#"{ "ambient": { "kind": "plane" }, "curve": { "preset": "circle", "radius": 1 }, "horizon": { "t_max": 0.1 }, "speed": 2 }"#;
    std::fs::write(&path, text).unwrap();
    let o = lmcf(&["flow", "run", path.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("speed"), "{}", stderr(&o));
}

#[test]
fn circle_runs_are_terminal_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let o = lmcf(&["flow", "run", scenario("circle.json").to_str().unwrap(), "--out-dir", d.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    }
    for name in ["flow.csv", "events.json", "frames/frame_0000.svg"] {
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap(), "{name}");
    }
    let csv = std::fs::read_to_string(a.join("flow.csv")).unwrap();
    assert!(csv.starts_with("# lmcf-flow-csv v1\nt,step,"));
    let record: serde_json::Value = serde_json::from_slice(&std::fs::read(a.join("run_record.json")).unwrap()).unwrap();
    assert_eq!(record["exit_code"], 2);
    assert_eq!(record["status"], "terminal-singularity");
    let frames = record["outputs"].as_array().unwrap().iter().filter(|e| e["kind"] == "frame").count();
    assert!(frames >= 5, "{frames} frames");
}

#[test]
fn equal_figure_eight_collapses_once() {
    let dir = tempfile::tempdir().unwrap();
    let o = lmcf(&["flow", "run", scenario("infinity_equal.json").to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let log: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("events.json")).unwrap()).unwrap();
    assert_eq!(log["status"], "empty");
    let kinds: Vec<&str> = log["events"].as_array().unwrap().iter().map(|e| e["event"].as_str().unwrap()).collect();
    assert_eq!(kinds, vec!["collapse"]);
}

#[test]
fn circle_probe_reads_type_one() {
    let o = lmcf(&["flow", "probe", scenario("circle.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(json(&o)["probe"]["kind"], "type-i");
}

#[test]
fn stability_documents() {
    let doc = scenario("slicing.json");
    let o = lmcf(&["stability", "check", doc.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "all axioms hold");
    let o = lmcf(&["stability", "hn", doc.to_str().unwrap(), "--object", "C", "--json"]);
    let factors: Vec<String> = json(&o).as_array().unwrap().iter().map(|f| f["factor"].as_str().unwrap().to_string()).collect();
    assert_eq!(factors, vec!["A", "B"]);
    let o = lmcf(&["stability", "phase", doc.to_str().unwrap(), "--class", "0,1", "--json"]);
    assert!((json(&o)["phase"].as_f64().unwrap() - PI / 4.0).abs() < 1e-12);

    // B moved off the ray of its charge
    let mut v: serde_json::Value = serde_json::from_slice(&std::fs::read(&doc).unwrap()).unwrap();
    v["category"]["objects"][1]["phase"] = serde_json::json!(0.3);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("mutant.json");
    std::fs::write(&bad, v.to_string()).unwrap();
    let o = lmcf(&["stability", "check", bad.to_str().unwrap(), "--json"]);
    let report = json(&o);
    assert_eq!(report["violations"][0]["axiom"], "charge_compatible");
    assert_eq!(report["violations"][0]["witnesses"], serde_json::json!(["B"]));
}
