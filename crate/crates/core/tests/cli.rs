use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cgvf::sim::config::ScenarioConfig;
use cgvf::sim::presets;
use cgvf::sim::telemetry::read_telemetry;

const TRIANGLE: &str = r#"
name = "triangle"
description = "three robots on a circle"

[run]
duration = 20.0
step = 0.001
decimate = 100
seed = 3

[graph]
cycle = 3

[[robots]]
count = 3
k_phi = 1.0

[robots.set]
catalog = "circle"
params = [2.0]

[robots.initial.random]
w_min = -3.0
w_max = 3.0
offset = 1.0

[coordination]
k_c = 1.0
reference_spacing = [2.0943951023931953]
"#;

fn cgvf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cgvf")).args(args).output().expect("binary runs")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.display().to_string()
}

#[test]
fn run_writes_telemetry_diagnostics_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "triangle.toml", TRIANGLE);
    let out = dir.path().join("out");
    let o = cgvf(&["run", &spec, "--out", out.to_str().unwrap(), "--plot"]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    for f in ["telemetry.csv", "diagnostics.csv", "summary.json", "trajectories.svg"] {
        assert!(out.join(f).is_file(), "{f} missing");
    }

    let frames = read_telemetry(fs::File::open(out.join("telemetry.csv")).unwrap(), 2, 1, false).unwrap();
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    let last = frames.last().unwrap();
    assert!((last.t - 20.0).abs() < 1e-9);
    let fin = &summary["final"];
    assert!((fin["V"].as_f64().unwrap() - last.v).abs() <= 1e-12 * (1.0 + last.v));
    assert!((fin["max_phi_norm"].as_f64().unwrap() - last.max_phi_norm()).abs() < 1e-12);
    assert_eq!(summary["frames"].as_u64().unwrap() as usize, frames.len());
    assert!(fin["composite_error"].as_f64().unwrap() < 1e-3);
}

#[test]
fn missing_scenario_exits_2_and_names_the_path() {
    let o = cgvf(&["run", "/nonexistent/scenario.toml"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o.stderr).contains("/nonexistent/scenario.toml"));
}

#[test]
fn inconsistent_cycle_differences_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let body = TRIANGLE.replace(
        "reference_spacing = [2.0943951023931953]",
        "deltas = [{ edge = [1, 2], values = [0.5] }, { edge = [2, 3], values = [0.0] }, { edge = [3, 1], values = [0.0] }]",
    );
    let spec = write(dir.path(), "bad.toml", &body);
    let o = cgvf(&["run", &spec, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = text(&o.stderr);
    assert!(err.contains("cycle"), "{err}");
    assert!(err.contains("(1,2)"), "{err}");
}

#[test]
fn validate_reports_disconnected_graph_and_bad_gains() {
    let dir = tempfile::tempdir().unwrap();
    let body = TRIANGLE
        .replace("cycle = 3", "vertices = 3\nedges = [[1, 2]]")
        .replace("k_phi = 1.0", "k_phi = -1.0");
    let spec = write(dir.path(), "bad.toml", &body);
    let o = cgvf(&["validate", &spec]);
    assert_eq!(o.status.code(), Some(1));
    let out = text(&o.stdout);
    assert!(out.contains("Assumption 1 FAILED"), "{out}");
    assert!(out.contains("gain positivity FAILED"), "{out}");

    let good = write(dir.path(), "good.toml", TRIANGLE);
    let o = cgvf(&["validate", &good]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stdout));
}

#[test]
fn sweep_over_coordination_gain_settles_faster() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "triangle.toml", TRIANGLE);
    let out = dir.path().join("sweep");
    let o = cgvf(&["sweep", &spec, "--param", "k_c", "--values", "1,10,100", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    let mut rd = csv::Reader::from_path(out.join("sweep.csv")).unwrap();
    let col = rd.headers().unwrap().iter().position(|h| h == "settling_time").unwrap();
    let times: Vec<f64> = rd.records().map(|r| r.unwrap()[col].parse().unwrap()).collect();
    assert_eq!(times.len(), 3);
    assert!(times[0] > times[1] && times[1] > times[2], "{times:?}");
}

#[test]
fn sweep_without_values_is_a_usage_error() {
    let o = cgvf(&["sweep", "preset:sim2", "--param", "k_c"]);
    assert_eq!(o.status.code(), Some(2));
    let o = cgvf(&["sweep", "preset:sim2", "--param", "nope", "--values", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o.stderr).contains("nope"));
}

#[test]
fn unknown_preset_is_a_usage_error() {
    let o = cgvf(&["validate", "preset:nope"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o.stderr).contains("nope"));
}

#[test]
fn exported_presets_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = cgvf(&["presets", "export", "--dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    for cfg in presets::all() {
        let src = fs::read_to_string(dir.path().join(format!("{}.toml", cfg.name))).unwrap();
        assert_eq!(ScenarioConfig::from_toml(&src).unwrap(), cfg);
    }
}

#[test]
fn shipped_preset_files_match_builtins() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../presets");
    for cfg in presets::all() {
        let src = fs::read_to_string(root.join(format!("{}.toml", cfg.name))).unwrap();
        assert_eq!(ScenarioConfig::from_toml(&src).unwrap(), cfg, "{}", cfg.name);
    }
}
