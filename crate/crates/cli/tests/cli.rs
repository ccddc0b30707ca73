use std::path::Path;
use std::process::{Command, Output};

use perforate_core::pipeline::{write_state_file, StateTensor};
use serde_json::Value;

fn perforate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_perforate"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn decode_prints_torus_betti_numbers() {
    let out = perforate(&["decode", "2.4849066497880004"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "H1=2 H2=1");
}

#[test]
fn decode_of_garbage_is_a_data_error() {
    let out = perforate(&["decode", "2.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_a_usage_error_naming_it() {
    let out = perforate(&["decode", "1.0", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--bogus"));
    let out = perforate(&["persist", "x.csv", "--max-eps", "wide"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--max-eps"));
}

#[test]
fn help_exits_cleanly() {
    assert_eq!(perforate(&["--help"]).status.code(), Some(0));
}

#[test]
fn persist_two_points_gives_two_zero_dimensional_bars() {
    let dir = tempfile::tempdir().unwrap();
    let cloud = dir.path().join("pair.csv");
    std::fs::write(&cloud, "0,0\n1,0\n").unwrap();
    let json = dir.path().join("bars.json");
    let out = perforate(&["persist", path(&cloud), "--out", path(&json)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = read_json(&json);
    let bars = doc["bars"].as_array().unwrap();
    assert_eq!(bars.len(), 2);
    assert_eq!(bars[0], serde_json::json!({ "dim": 0, "birth": 0.0, "death": 1.0 }));
    assert_eq!(bars[1], serde_json::json!({ "dim": 0, "birth": 0.0, "death": "inf" }));
    let manifest = &doc["manifest"];
    for key in ["metric", "max_dim", "max_epsilon", "threshold", "tool_version"] {
        assert!(manifest.get(key).is_some(), "manifest lacks {key}");
    }
}

#[test]
fn persist_on_missing_file_is_a_data_error() {
    let out = perforate(&["persist", "/nonexistent/cloud.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_accepts_good_and_rejects_truncated_files() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("states.hst");
    let t = StateTensor::new("s1", 2, 2, 1, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
    write_state_file(&file, &[t]).unwrap();
    assert_eq!(perforate(&["validate", path(&file)]).status.code(), Some(0));

    let bytes = std::fs::read(&file).unwrap();
    std::fs::write(&file, &bytes[..bytes.len() - 4]).unwrap();
    let out = perforate(&["validate", path(&file)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("s1"));
}

#[test]
fn corpus_to_curve_is_deterministic_and_validates() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.hst");
    let gen = perforate(&[
        "gen", "corpus", "--sentences", "6", "--tokens", "12", "--epochs", "3", "--out", path(&corpus),
    ]);
    assert_eq!(gen.status.code(), Some(0), "{}", String::from_utf8_lossy(&gen.stderr));

    let run = |out: &Path| {
        let o = perforate(&["perforation", path(&corpus), "--layer", "h", "--seed", "5", "--out", path(out)]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run(&a);
    run(&b);
    for name in ["h.curve.csv", "h.curve.json"] {
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap());
    }
    let csv = std::fs::read_to_string(a.join("h.curve.csv")).unwrap();
    assert!(csv.starts_with("epoch,mean,p01,p99,n\n"));
    assert_eq!(csv.lines().count(), 4);

    let curve = a.join("h.curve.json");
    assert_eq!(perforate(&["validate", "--curve", path(&curve)]).status.code(), Some(0));
    let mut doc = read_json(&curve);
    assert_eq!(doc["manifest"]["seed"], 5);
    doc["manifest"].as_object_mut().unwrap().remove("threshold");
    std::fs::write(&curve, doc.to_string()).unwrap();
    assert_eq!(perforate(&["validate", "--curve", path(&curve)]).status.code(), Some(2));
}

#[test]
fn mapper_of_a_circle_has_one_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let cloud = dir.path().join("circle.csv");
    let gen = perforate(&["gen", "shape", "--kind", "circle", "--n", "100", "--seed", "3", "--out", path(&cloud)]);
    assert_eq!(gen.status.code(), Some(0));
    let out = perforate(&[
        "mapper", path(&cloud), "--lens", "coord:0", "--resolution", "4", "--overlap", "0.3", "--out",
        path(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = read_json(&dir.path().join("mapper.json"));
    assert_eq!(doc["manifest"]["cycle_rank"], 1);
    assert_eq!(doc["manifest"]["resolution"], 4);
    let edges = std::fs::read_to_string(dir.path().join("mapper.edges")).unwrap();
    assert_eq!(edges.lines().count(), doc["nodes"].as_array().unwrap().len());
}

#[test]
fn window_finds_the_loop_in_a_periodic_coordinate() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("states.hst");
    let tokens = 66;
    let mut data = Vec::new();
    for t in 0..tokens {
        let s = (2.0 * std::f64::consts::PI * t as f64 / 50.0).sin();
        data.extend([s as f32, 0.25]);
    }
    write_state_file(&file, &[StateTensor::new("wave", tokens, 2, 1, data).unwrap()]).unwrap();
    let out = perforate(&["window", path(&file), "--tau", "8", "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = read_json(&dir.path().join("window.json"));
    let phi = doc["perforation"][0].as_f64().unwrap();
    assert!((phi - 2f64.ln()).abs() < 1e-12);
    assert_eq!(doc["perforation"][1].as_f64(), Some(0.0));
    assert_eq!(doc["manifest"]["tau"], 8);
    let csv = std::fs::read_to_string(dir.path().join("window.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("dimension,perforation"));
}

#[test]
fn window_marks_short_series_as_null() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("short.hst");
    write_state_file(&file, &[StateTensor::new("tiny", 2, 1, 1, vec![0.0, 1.0]).unwrap()]).unwrap();
    let out = perforate(&["window", path(&file), "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    let doc = read_json(&dir.path().join("window.json"));
    assert!(doc["perforation"][0].is_null());
    assert!(doc["mean"].is_null());
}
