use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lattice-spectral"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

#[test]
fn free_potential_is_not_generic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"potential": {"offset": 0, "values": []}}"#).unwrap();
    let out = dir.path().join("out");
    let o = run(&["genericity", "--config", cfg.to_str().unwrap(), "--out", &out_arg(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("genericity.json")).unwrap();
    assert!(text.contains("\"generic\": false"));
    assert!(text.contains("\"w0\": 0.0"));
    assert_eq!(json(&out.join("genericity.json"))["agree"], Value::Bool(true));
}

#[test]
fn single_site_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["spectrum", "--out", &out_arg(dir.path())]);
    assert!(o.status.success());
    let v = json(&dir.path().join("spectrum.json"));
    let eig = v["eigenvalues"].as_array().unwrap();
    assert_eq!(eig.len(), 1);
    assert!((eig[0].as_f64().unwrap() + 0.5).abs() < 1e-8);
    assert_eq!(v["window"], 400);
    assert_eq!(v["config"]["sigma"], 3.0);
}

#[test]
fn decay_fit_reports_three_halves() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["decay-fit", "--window", "2050", "--tmax", "1000", "--out", &out_arg(dir.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let slope = json(&dir.path().join("decay.json"))["slope"].as_f64().unwrap();
    assert!((slope + 1.5).abs() < 0.1, "{slope}");
    let csv = fs::read_to_string(dir.path().join("decay.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# config: {"));
    assert_eq!(lines.next().unwrap(), "t,norm,kind,sigma");
    assert_eq!(lines.count(), 8);
}

#[test]
fn outputs_are_deterministic_and_echo_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"ensemble": 5, "seed": 9, "thetas": [-1.0, -2.0]}"#).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        assert!(run(&["genericity", "--config", cfg.to_str().unwrap(), "--out", &out_arg(d)]).status.success());
        assert!(run(&["oscillatory", "--tmax", "200", "--out", &out_arg(d)]).status.success());
    }
    let mut count = 0;
    for entry in fs::read_dir(&a).unwrap() {
        let name = entry.unwrap().file_name();
        if name == "run.log" {
            continue;
        }
        let (x, y) = (fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap());
        assert_eq!(x, y, "{name:?}");
        assert!(String::from_utf8(x).unwrap().contains("\"command\""));
        count += 1;
    }
    assert_eq!(count, 5);
    assert!(fs::read_to_string(a.join("run.log")).unwrap().contains("unix_time="));
}

#[test]
fn flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"window": 300, "sigma": 2.0, "seed": 1}"#).unwrap();
    let o = run(&[
        "spectrum", "--config", cfg.to_str().unwrap(), "--window", "250", "--seed", "7", "--out", &out_arg(dir.path()),
    ]);
    assert!(o.status.success());
    let c = &json(&dir.path().join("spectrum.json"))["config"];
    assert_eq!(c["window"], 250);
    assert_eq!(c["sigma"], 2.0);
    assert_eq!(c["seed"], 7);
}

#[test]
fn potential_from_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("v.json"), r#"{"offset": 0, "values": [1.5]}"#).unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"potential": "v.json", "window": 100}"#).unwrap();
    let o = run(&["spectrum", "--config", cfg.to_str().unwrap(), "--out", &out_arg(dir.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let eig = json(&dir.path().join("spectrum.json"))["eigenvalues"].clone();
    assert!((eig[0].as_f64().unwrap() - 4.5).abs() < 1e-8);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"windw": 10}"#).unwrap();
    let o = run(&["spectrum", "--config", cfg.to_str().unwrap(), "--out", &out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("windw"));

    assert_eq!(run(&["spectrum", "--window", "0", "--out", &out]).status.code(), Some(2));
    assert_eq!(run(&["decay-fit", "--tmax", "1000", "--out", &out]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));

    let o = run(&["spectrum", "--window", "8", "--out", &out]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("enlarge window"));
}
