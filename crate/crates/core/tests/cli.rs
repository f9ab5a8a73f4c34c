use std::path::Path;
use std::process::Command;

use fbmre::cli::output::sha256_file;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fbmre"));
    c.env_remove("FBMRE_OUT_DIR");
    c
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let p = dir.join("run.json");
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn missing_seed_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["persist", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
}

#[test]
fn parse_errors_and_help() {
    assert_eq!(bin().arg("--bogus").output().unwrap().status.code(), Some(1));
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
    assert_eq!(bin().arg("--version").output().unwrap().status.code(), Some(0));
}

#[test]
fn unknown_check_lists_valid_names() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["--seed", "1", "verify", "--checks", "nope", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("mills") && err.contains("rkhs"), "{err}");
}

#[test]
fn mills_filter_runs_only_mills() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["--seed", "1", "verify", "--checks", "mills", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("verify.json")).unwrap()).unwrap();
    let entries = report["entries"].as_array().unwrap();
    assert!(!entries.is_empty());
    assert!(entries.iter().all(|e| e["group"] == "mills"));
    assert_eq!(report["all_passed"], true);
}

#[test]
fn unknown_config_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"seed": 1, "persist": {"horizonz": [2]}}"#);
    let out = bin().arg("--config").arg(&cfg).arg("persist").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn empty_epsilon_grid_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"seed": 1, "small_barrier": {"epsilons": []}}"#);
    let out = bin()
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .arg("small-barrier")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn rare_event_without_enough_paths_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"seed": 1, "persist": {"law": {"type": "point", "h": 0.5}, "horizons": [16, 1000000], "n_paths": 1000}}"#,
    );
    let out = bin()
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .arg("persist")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("pilot"));
}

fn persist_once(dir: &Path, workers: &str) -> (Vec<u8>, serde_json::Value) {
    let cfg = write_config(
        dir,
        r#"{"seed": 99, "persist": {"law": {"type": "uniform", "a": 0.4, "b": 0.8},
            "horizons": [2, 4, 8, 16], "n_paths": 20000}}"#,
    );
    let out = bin()
        .arg("--config")
        .arg(&cfg)
        .args(["--workers", workers, "persist"])
        .env("FBMRE_OUT_DIR", dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    (std::fs::read(dir.join("persist.csv")).unwrap(), manifest)
}

#[test]
fn persist_is_reproducible_and_digests_match() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (da, ma) = persist_once(a.path(), "1");
    let (db, _) = persist_once(b.path(), "3");
    assert_eq!(da, db);
    let text = String::from_utf8(da).unwrap();
    assert!(text.starts_with("quantity,H_or_law,T_or_eps,m,n_paths,n_hits,p_hat,std_err,ci_lo,ci_hi,seed\n"));
    assert_eq!(text.lines().count(), 5);
    for o in ma["outputs"].as_array().unwrap() {
        let file = a.path().join(o["file"].as_str().unwrap());
        assert_eq!(o["sha256"].as_str().unwrap(), sha256_file(&file).unwrap());
    }
    assert_eq!(ma["command"], "persist");
    assert!(ma["stages"].as_array().unwrap().len() >= 3);
}

#[test]
fn flag_out_dir_beats_config_and_environment() {
    let (a, b, c) = (
        tempfile::tempdir().unwrap(),
        tempfile::tempdir().unwrap(),
        tempfile::tempdir().unwrap(),
    );
    let body = format!(
        r#"{{"seed": 3, "out_dir": {:?}, "simulate": {{"n_paths": 2, "m": 4}}}}"#,
        b.path()
    );
    let cfg = write_config(a.path(), &body);
    let run = |extra: &[&str]| {
        let out = bin()
            .arg("--config")
            .arg(&cfg)
            .args(extra)
            .arg("simulate")
            .env("FBMRE_OUT_DIR", c.path())
            .output();
        assert_eq!(out.unwrap().status.code(), Some(0));
    };
    run(&["--out", a.path().to_str().unwrap()]);
    assert!(a.path().join("paths.csv").exists());
    run(&[]);
    assert!(b.path().join("paths.csv").exists());
    assert!(!c.path().join("paths.csv").exists());
}

#[test]
fn simulate_writes_every_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"seed": 4, "simulate": {"hurst": 0.3, "horizon": 2, "m": 8, "n_paths": 3}}"#,
    );
    let out = bin()
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .arg("simulate")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("paths.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 17);
    assert!(text.lines().nth(1).unwrap().starts_with("0,0.3,0,0,0"));
}

#[test]
fn bench_checksums_repeat() {
    let checksums = |dir: &Path| -> Vec<String> {
        let cfg = write_config(
            dir,
            r#"{"seed": 5, "bench": {"hursts": [0.6], "sizes": [8, 64], "paths": 4}}"#,
        );
        let out = bin()
            .arg("--config")
            .arg(&cfg)
            .arg("--out")
            .arg(dir)
            .arg("bench")
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        let text = std::fs::read_to_string(dir.join("bench.csv")).unwrap();
        text.lines()
            .skip(1)
            .map(|l| l.rsplit(',').next().unwrap().to_string())
            .collect()
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ca = checksums(a.path());
    assert_eq!(ca.len(), 4);
    assert_eq!(ca, checksums(b.path()));
}

#[test]
fn in_process_entry_point_maps_exit_codes() {
    assert_eq!(fbmre::cli::main_with_args(["fbmre", "persist"]), 1);
    assert_eq!(fbmre::cli::main_with_args(["fbmre", "--nope"]), 1);
}
