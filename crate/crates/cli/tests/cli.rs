//! Behavior of the `chromatic-tiler` binary: outputs, exit codes, files.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chromatic-tiler"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn gamma_of_the_planar_lattices() {
    let o = run(&["gamma"]);
    assert_eq!(o.status.code(), Some(0));
    let g = stdout_json(&o)["parameters"]["gamma"].as_f64().unwrap();
    assert!((g - 2.0 / 3f64.sqrt()).abs() < 1e-9);
    let o = run(&["gamma", "--construction", "square"]);
    let g = stdout_json(&o)["parameters"]["gamma"].as_f64().unwrap();
    assert!((g - 2f64.sqrt()).abs() < 1e-9);
}

#[test]
fn malformed_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.json");
    fs::write(&cfg, r#"{"construction": {"kind": "heptagonal"}}"#).unwrap();
    assert_eq!(
        run(&["gamma", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    fs::write(&cfg, r#"{"eta": 0.5}"#).unwrap();
    assert_eq!(
        run(&["gamma", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["gamma", "--config", "/nonexistent/config.json"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn color_writes_three_files_and_they_verify() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["color", "--out", out, "--samples", "20000"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    for f in ["coloring.json", "report.json", "coloring.svg"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let report = read_json(&dir.path().join("report.json"));
    assert_eq!(report["schema"], 1);
    assert_eq!(report["passed"], true);
    assert_eq!(report["verification"]["sampled"]["violations"], 0);
    let coloring = read_json(&dir.path().join("coloring.json"));
    for key in [
        "schema",
        "n",
        "body",
        "lattice_basis",
        "translate_classes",
        "cells",
        "nu",
        "scale",
        "mode",
        "translates",
        "color_count",
    ] {
        assert!(coloring.get(key).is_some(), "coloring.json lacks {key}");
    }
    assert_eq!(coloring["color_count"], report["bounds"]["color_count_m"]);
    let svg = fs::read_to_string(dir.path().join("coloring.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("clipPath") && svg.contains("<circle"));

    let file = dir.path().join("coloring.json");
    let o = run(&[
        "verify",
        file.to_str().unwrap(),
        "--samples",
        "5000",
        "--lift-res",
        "128",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["passed"], true);
}

#[test]
fn verify_rejects_tampering_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(
        run(&["color", "--out", out, "--samples", "1000"])
            .status
            .code(),
        Some(0)
    );
    let original = read_json(&dir.path().join("coloring.json"));
    let tampered = dir.path().join("tampered.json");

    // Removing a translate the cover needs leaves uncovered points.
    let m = original["translates"].as_array().unwrap().len();
    let mut caught = false;
    for drop in 0..m {
        let mut t = original.clone();
        t["translates"].as_array_mut().unwrap().remove(drop);
        t["color_count"] = (m - 1).into();
        fs::write(&tampered, serde_json::to_string(&t).unwrap()).unwrap();
        let o = run(&[
            "verify",
            tampered.to_str().unwrap(),
            "--samples",
            "2000",
            "--lift-res",
            "256",
        ]);
        match o.status.code() {
            Some(0) => continue,
            code => {
                assert_eq!(code, Some(1));
                let r = stdout_json(&o);
                assert_eq!(r["passed"], false);
                assert!(r["verification"]["totality"]["uncovered"].as_u64().unwrap() > 0);
                caught = true;
                break;
            }
        }
    }
    assert!(caught, "no single translate turned out to be necessary");

    fs::write(&tampered, "{ not json").unwrap();
    assert_eq!(
        run(&["verify", tampered.to_str().unwrap()]).status.code(),
        Some(2)
    );
    let mut t = original.clone();
    t["color_count"] = 99.into();
    fs::write(&tampered, serde_json::to_string(&t).unwrap()).unwrap();
    assert_eq!(
        run(&["verify", tampered.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn unsupported_dimension_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "color",
        "--construction",
        "ball-generic",
        "--n",
        "5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unsupported"));
    let o = run(&[
        "color",
        "--delta",
        "1.5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin()
        .arg("gamma")
        .env("CHROMATIC_TILER_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bounds_table() {
    let o = run(&["bounds", "--n", "100", "10000", "--k", "1", "--gamma", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    let rows = v["rows"].as_array().unwrap();
    assert!((rows[0]["chromatic_bound_ln"].as_f64().unwrap() - 116.8556).abs() < 1e-3);
    assert_eq!(rows[0]["two_ln_k"].as_f64().unwrap(), 0.0);
    assert!(rows[1]["chromatic_bound_per_dimension"].as_f64().unwrap() <= 3.01);
    assert!(rows[1]["chromatic_bound"].is_null());
    assert_eq!(run(&["bounds", "--n", "1"]).status.code(), Some(2));
}

#[test]
fn baseline7_passes_with_seven_colors() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "baseline7",
        "--samples",
        "20000",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["verification"]["color_count"], 7);
    let file = dir.path().join("coloring.json");
    assert_eq!(read_json(&file)["mode"], "cell_partition");
    let o = run(&["verify", file.to_str().unwrap(), "--samples", "5000"]);
    assert_eq!(o.status.code(), Some(0));
}
