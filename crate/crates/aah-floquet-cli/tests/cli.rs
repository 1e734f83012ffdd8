//! End-to-end checks of the batch front end: config validation, file
//! formats, manifest contracts, determinism, exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn binary() -> PathBuf {
    // target/<profile>/aahf next to the test executable
    let mut path = std::env::current_exe().unwrap();
    path.pop();
    path.pop();
    path.push(format!("aahf{}", std::env::consts::EXE_SUFFIX));
    path
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("aahf-test-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn chern_config(out: &Path) -> String {
    format!(
        r#"{{
        "task": "chern",
        "model": {{ "drive_period": 2.0, "tilt_ratio": "3/1" }},
        "system": {{ "cells": 5, "particles": 1 }},
        "numerics": {{ "chern_grid": [12, 12] }},
        "output": {{ "dir": "{}" }}
    }}"#,
        out.display()
    )
}

#[test]
fn chern_task_writes_manifest_and_results() {
    let dir = tmp_dir("chern");
    let out = dir.join("out");
    let cfg = write_config(&dir, "cfg.json", &chern_config(&out));
    let status = Command::new(binary())
        .args(["run", "--config"])
        .arg(&cfg)
        .status()
        .unwrap();
    assert!(status.success());

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["tool"], "aahf");
    assert_eq!(manifest["results"]["chern"], serde_json::json!([-2, 4, -2]));
    assert_eq!(manifest["results"]["total"], 0);
    // every output is listed with a checksum
    let outputs = manifest["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 1);
    assert_eq!(outputs[0]["path"], "chern.json");
    let sha = outputs[0]["sha256"].as_str().unwrap();
    assert_eq!(sha.len(), 64);
    // convention note recorded
    assert!(manifest["eigenphase_convention"]
        .as_str()
        .unwrap()
        .contains("exp(+i*eps)"));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn runs_are_deterministic() {
    let dir = tmp_dir("determinism");
    let out1 = dir.join("a");
    let out2 = dir.join("b");
    for out in [&out1, &out2] {
        let cfg = write_config(&dir, "cfg.json", &chern_config(out));
        let status = Command::new(binary())
            .args(["run", "--config"])
            .arg(&cfg)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = fs::read(out1.join("chern.json")).unwrap();
    let b = fs::read(out2.join("chern.json")).unwrap();
    assert_eq!(a, b, "identical configs must produce identical outputs");
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bands_csv_format_contract() {
    let dir = tmp_dir("bands");
    let out = dir.join("out");
    let cfg = write_config(
        &dir,
        "cfg.json",
        &format!(
            r#"{{
            "task": "bands",
            "model": {{ "drive_period": 2.0, "tilt_ratio": "3/1" }},
            "system": {{ "cells": 5, "particles": 1 }},
            "numerics": {{ "band_grid": [6, 6] }},
            "output": {{ "dir": "{}" }}
        }}"#,
            out.display()
        ),
    );
    let status = Command::new(binary())
        .args(["run", "--config"])
        .arg(&cfg)
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(out.join("bands.csv")).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# aahf "));
    assert!(lines.next().unwrap().starts_with("# run_checksum "));
    assert_eq!(lines.next().unwrap(), "beta,phi,band,quasienergy");
    // 6x6 grid, 3 bands
    assert_eq!(lines.count(), 6 * 6 * 3);

    // the run checksum in the CSV matches the manifest
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let checksum = manifest["run_checksum"].as_str().unwrap();
    assert!(text.contains(checksum));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn config_errors_exit_2() {
    let dir = tmp_dir("badcfg");
    let cfg = write_config(
        &dir,
        "cfg.json",
        r#"{
        "task": "bands",
        "model": { "drive_period": -2.0 },
        "system": { "cells": 5, "particles": 1 },
        "output": { "dir": "nowhere" }
    }"#,
    );
    let status = Command::new(binary())
        .args(["run", "--config"])
        .arg(&cfg)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // non-coprime (L, N) is input validation, also exit 2
    let cfg = write_config(
        &dir,
        "cfg2.json",
        r#"{
        "task": "bands",
        "model": { "drive_period": 2.0 },
        "system": { "cells": 4, "particles": 2 },
        "output": { "dir": "nowhere" }
    }"#,
    );
    let status = Command::new(binary())
        .args(["run", "--config"])
        .arg(&cfg)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn seed_cap_flag_limits_dimension() {
    let dir = tmp_dir("seedcap");
    let out = dir.join("out");
    let cfg = write_config(&dir, "cfg.json", &chern_config(&out));
    let status = Command::new(binary())
        .args(["run", "--seed-cap", "5", "--config"])
        .arg(&cfg)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn unknown_figure_rejected() {
    let dir = tmp_dir("fig");
    let status = Command::new(binary())
        .args(["reproduce", "fig9", "--out"])
        .arg(dir.join("out"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn pump_task_writes_trajectory() {
    let dir = tmp_dir("pump");
    let out = dir.join("out");
    let cfg = write_config(
        &dir,
        "cfg.json",
        &format!(
            r#"{{
            "task": "pump",
            "model": {{ "drive_period": 2.0, "tilt_ratio": "3/1" }},
            "system": {{ "cells": 21, "particles": 1 }},
            "numerics": {{ "periods": 40, "band": 0, "initial": "wannier", "chern_hint": -2.0 }},
            "output": {{ "dir": "{}" }}
        }}"#,
            out.display()
        ),
    );
    let status = Command::new(binary())
        .args(["run", "--config"])
        .arg(&cfg)
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(out.join("pump.csv")).unwrap();
    let data_lines = text.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(data_lines, 1 + 40 + 1); // header + M+1 samples
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert!(manifest["results"]["drift_cells"].is_number());
    fs::remove_dir_all(&dir).unwrap();
}
