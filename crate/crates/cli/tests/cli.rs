use std::path::Path;
use std::process::{Command, Output};

fn geotan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geotan")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write_generated(dir: &Path, file: &str, args: &[&str]) -> String {
    let path = dir.join(file).to_string_lossy().into_owned();
    let mut full = vec!["--out", path.as_str(), "generate"];
    full.extend_from_slice(args);
    let o = geotan(&full);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    path
}

#[test]
fn spiral_csv_starts_at_origin() {
    let o = geotan(&["generate", "--name", "spiral", "--h", "0.01"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# dim=2"));
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first, vec![0.0, 0.0]);
}

#[test]
fn poke_graph_carries_k_marker() {
    let o = geotan(&["generate", "--name", "poke_graph", "--depth", "3", "--h", "0.03"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.contains("markers=K,K_corner"), "{header}");
    let marked = text
        .lines()
        .skip(1)
        .filter(|l| l.split(',').nth(4) == Some("1"))
        .count();
    assert!(marked > 0);
}

#[test]
fn invalid_lambda_is_a_data_error() {
    let o = geotan(&["generate", "--name", "poke_graph", "--lambda", "2"]);
    assert_eq!(code(&o), 2);
    assert!(!o.stderr.is_empty());
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&geotan(&["nonsense"])), 1);
    assert_eq!(code(&geotan(&["generate", "--name", "nope"])), 1);
    assert_eq!(code(&geotan(&["demo", "nope"])), 1);
    assert_eq!(code(&geotan(&["--help"])), 0);
}

#[test]
fn missing_input_is_a_data_error() {
    assert_eq!(code(&geotan(&["analyze", "/nonexistent/x.csv", "--index", "0"])), 2);
}

#[test]
fn demo_json_is_deterministic_and_untimed() {
    let a = geotan(&["--seed", "3", "demo", "grid-equivalence"]);
    let b = geotan(&["--seed", "3", "--threads", "1", "demo", "grid-equivalence"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert!(v.get("runtime_seconds").is_none());

    let t = geotan(&["--timing", "demo", "grid-equivalence"]);
    let v: serde_json::Value = serde_json::from_slice(&t.stdout).unwrap();
    assert!(v["runtime_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn analyze_and_pack_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_generated(dir.path(), "s.csv", &["--name", "spiral", "--h", "0.01"]);
    let run = |args: &[&str]| {
        let o = geotan(args);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        o.stdout
    };
    let an = ["analyze", input.as_str(), "--index", "0", "--mode", "gh"];
    assert_eq!(run(&an), run(&an));
    let pk = ["pack", input.as_str(), "--mode", "upper", "--s", "1", "--delta", "0.1"];
    let first = run(&pk);
    assert_eq!(first, run(&pk));
    let v: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert!(v["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn svg_needs_axes_for_3d_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_generated(dir.path(), "p.csv", &["--name", "poke_graph", "--depth", "3", "--h", "0.03"]);
    assert_eq!(code(&geotan(&["svg", input.as_str()])), 2);
    assert_eq!(code(&geotan(&["svg", input.as_str(), "--axes", "0,0"])), 2);
    let o = geotan(&["svg", input.as_str(), "--axes", "0,2"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("<svg"));
    assert!(text.contains("<circle"));
}

#[test]
fn svg_blow_up_draws_crosshair() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_generated(dir.path(), "s.csv", &["--name", "spiral", "--h", "0.01"]);
    let o = geotan(&["svg", input.as_str(), "--point", "0,0", "--scale", "0.25"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8(o.stdout).unwrap().contains("stroke=\"red\""));
}

fn verdict(args: &[&str]) -> String {
    let o = geotan(args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    v["verdict"].as_str().unwrap().to_string()
}

#[test]
fn analyze_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let spiral = write_generated(dir.path(), "s.csv", &["--name", "spiral", "--t-min", "1e-4", "--t-max", "1", "--h", "1e-3"]);
    assert_eq!(verdict(&["analyze", spiral.as_str(), "--point", "0,0", "--mode", "aw"]), "rotating");
    assert_eq!(verdict(&["analyze", spiral.as_str(), "--point", "0,0", "--mode", "gh"]), "gh_unique");

    let plane = dir.path().join("plane.csv");
    let mut text = String::from("# dim=3 resolution=0.01 label=plane\n");
    for i in -100..=100 {
        for j in -100..=100 {
            text.push_str(&format!("{},{},0\n", i as f64 / 100.0, j as f64 / 100.0));
        }
    }
    std::fs::write(&plane, text).unwrap();
    let plane = plane.to_string_lossy().into_owned();
    assert_eq!(verdict(&["analyze", plane.as_str(), "--point", "0,0,0", "--n", "2"]), "flat");
}

#[test]
fn point_off_the_set_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let spiral = write_generated(dir.path(), "s.csv", &["--name", "spiral", "--h", "0.01"]);
    assert_eq!(code(&geotan(&["analyze", spiral.as_str(), "--point", "5,5"])), 2);
}
