//! End-to-end behaviour of the `coadjoint` binary: exit codes, cache, replay and schemas.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coadjoint"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

fn cache_files(out: &Path) -> Vec<std::path::PathBuf> {
    fs::read_dir(out.join("cache")).unwrap().map(|e| e.unwrap().path()).collect()
}

#[test]
fn passing_preset_exits_zero_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(dir.path(), &["preset", "torus-u1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("report.txt").exists());
    assert_eq!(report(dir.path())["verdict"], "pass");
}

#[test]
fn usage_and_validation_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bin(dir.path(), &["preset", "no-such-preset"]).status.code(), Some(1));
    assert_eq!(bin(dir.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(bin(dir.path(), &["--tolerance", "-1", "preset", "torus-u1"]).status.code(), Some(1));
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"schema_version": 1, "kind": "kirillov_compact", "group": "su2", "unknown": 3}"#).unwrap();
    assert_eq!(bin(dir.path(), &["run", bad.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(bin(dir.path(), &["run", "/nonexistent/config.json"]).status.code(), Some(1));
}

#[test]
fn unreachable_tolerance_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(dir.path(), &["--tolerance", "1e-16", "preset", "torus-u1"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(report(dir.path())["verdict"], "inconclusive");
}

#[test]
fn cache_hits_misses_and_recovery() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    assert_eq!(bin(out, &["preset", "su2-kirillov"]).status.code(), Some(0));
    let first = report(out);
    assert_eq!(first["provenance"]["cached"], false);

    assert_eq!(bin(out, &["preset", "su2-kirillov"]).status.code(), Some(0));
    let second = report(out);
    assert_eq!(second["provenance"]["cached"], true);
    assert_eq!(first["rows"], second["rows"]);

    // a changed tolerance is a different config
    assert_eq!(bin(out, &["--tolerance", "1e-5", "preset", "su2-kirillov"]).status.code(), Some(0));
    let third = report(out);
    assert_eq!(third["provenance"]["cached"], false);
    assert_ne!(third["provenance"]["config_hash"], first["provenance"]["config_hash"]);
    assert_eq!(cache_files(out).len(), 2);

    // corrupt entries and a cleared cache both recompute
    for f in cache_files(out) {
        fs::write(f, "{ not json").unwrap();
    }
    assert_eq!(bin(out, &["preset", "su2-kirillov"]).status.code(), Some(0));
    assert_eq!(report(out)["provenance"]["cached"], false);
    fs::remove_dir_all(out.join("cache")).unwrap();
    assert_eq!(bin(out, &["preset", "su2-kirillov"]).status.code(), Some(0));
    assert_eq!(report(out)["provenance"]["cached"], false);
}

#[test]
fn embedded_config_replays_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(bin(&a, &["--seed", "17", "preset", "sl2r-sigma-c"]).status.code(), Some(0));
    let original = report(&a);
    let config = dir.path().join("replay.json");
    fs::write(&config, serde_json::to_string(&original["config"]).unwrap()).unwrap();
    assert_eq!(bin(&b, &["run", config.to_str().unwrap()]).status.code(), Some(0));
    let replay = report(&b);
    assert_eq!(replay["provenance"]["cached"], false);
    assert_eq!(original["provenance"]["config_hash"], replay["provenance"]["config_hash"]);
    assert_eq!(original["rows"], replay["rows"]);
    assert_eq!(original["checks"], replay["checks"]);
}

#[test]
fn reports_and_configs_match_the_published_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(dir.path(), &["schema"]);
    assert_eq!(o.status.code(), Some(0));
    let schemas: Value = serde_json::from_slice(&o.stdout).unwrap();
    let report_schema = jsonschema::validator_for(&schemas["report"]).unwrap();
    let config_schema = jsonschema::validator_for(&schemas["config"]).unwrap();
    for name in ["torus-rx", "su2-coherence", "sl2r-admissible"] {
        let out = dir.path().join(name);
        let status = bin(&out, &["preset", name]).status.code();
        assert!(matches!(status, Some(0) | Some(3)), "{name}: {status:?}");
        let r = report(&out);
        let errors: Vec<String> = report_schema.iter_errors(&r).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{name}: {errors:?}");
        assert!(config_schema.is_valid(&r["config"]));
    }
    assert!(!config_schema.is_valid(&serde_json::json!({"kind": "kirillov_compact"})));
}

#[test]
fn export_contour_writes_one_row_per_node() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(dir.path(), &["export-contour", "su2-kirillov"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("contour.csv")).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().unwrap().clone();
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.len() == header.len()));
    assert!(!dir.path().join("report.json").exists());
}

#[test]
fn preset_list_names_every_preset() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(dir.path(), &["preset", "list"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    for (name, _) in coadjoint::cli::PRESETS {
        assert!(text.contains(name), "{name}");
    }
}
