use std::path::Path;
use std::process::{Command, Output};

fn mather(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mather"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn model_build_writes_spec() {
    let dir = tempfile::tempdir().unwrap();
    let out = mather(dir.path(), &["model", "build", "--out", "m.json"]);
    assert_eq!(out.status.code(), Some(0));
    let spec: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("m.json")).unwrap()).unwrap();
    for key in [
        "n",
        "K",
        "delta",
        "half_width",
        "smoothing",
        "variant",
        "metric_profile",
    ] {
        assert!(spec.get(key).is_some(), "missing {key}");
    }
    assert!(String::from_utf8_lossy(&out.stderr).contains("satisfied"));
}

#[test]
fn weak_barrier_warns() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "k1.json", r#"{"n": 2, "K": 1}"#);
    let out = mather(
        dir.path(),
        &["model", "build", "--model", "k1.json", "--out", "m.json"],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn overlapping_channels_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "wide.json", r#"{"n": 2, "half_width": 1.0}"#);
    let out = mather(dir.path(), &["model", "build", "--model", "wide.json"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("overlap") && err.contains("A"), "{err}");
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "unknown.json", r#"{"bogus": 1}"#);
    write(
        dir.path(),
        "region.json",
        r#"{"region": [{"min": 1, "max": 0, "count": 9}, {"min": 0, "max": 0, "count": 1}]}"#,
    );
    write(
        dir.path(),
        "dims.json",
        r#"{"region": [{"min": 0, "max": 1, "count": 9}]}"#,
    );
    for args in [
        vec!["alpha", "--config", "unknown.json"],
        vec!["alpha", "--config", "region.json"],
        vec!["alpha", "--config", "dims.json"],
        vec!["alpha", "--resolution", "4"],
        vec!["flat", "--tol", "-1"],
        vec!["alpha", "--jobs", "0"],
    ] {
        let out = mather(dir.path(), &args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn dry_run_prints_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.json", r#"{"seed": 3, "resolution": 9}"#);
    let out = mather(
        dir.path(),
        &[
            "corners",
            "--config",
            "c.json",
            "--resolution",
            "17",
            "--dry-run",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let cfg: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(cfg["resolution"], 17);
    assert_eq!(cfg["seed"], 3);
    assert_eq!(cfg["command"], "corners");
    assert_eq!(cfg["solver"]["seed"], 3);
}

#[test]
fn alpha_slice_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = mather(
        dir.path(),
        &["alpha", "--resolution", "21", "--out", "a.csv"],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let mut reader = csv::Reader::from_path(dir.path().join("a.csv")).unwrap();
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        ["c_1", "c_2", "alpha", "winner_h", "winner_T", "channel"]
    );
    assert_eq!(reader.records().count(), 21);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["schema"], "alpha_summary");
    assert_eq!(summary["data"]["minimum"][1], 0.0);
    let upper = summary["data"]["level_crossings"][1].as_f64().unwrap();
    assert!((upper - 1.0 / 8f64.sqrt()).abs() < 0.1);
}

#[test]
fn corners_respect_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let count = |tol: &str| {
        let out = mather(dir.path(), &["corners", "--tol", tol, "--out", "c.json"]);
        assert_eq!(out.status.code(), Some(0));
        let doc: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("c.json")).unwrap())
                .unwrap();
        doc["data"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|r| r["flagged"] == true)
            .count()
    };
    assert_eq!(count("0.001"), 2);
    assert_eq!(count("10"), 0);
}

#[test]
fn verify_lemma_and_beta() {
    let dir = tempfile::tempdir().unwrap();
    let out = mather(dir.path(), &["verify-lemma", "--out", "l.json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("l.json")).unwrap()).unwrap();
    assert!(doc["data"]["report"]["max_error"].as_f64().unwrap() < 1e-2);
    let out = mather(dir.path(), &["beta", "--out", "b.csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    assert!(text.starts_with("rho_1,rho_2,beta,winner_h,winner_T,channel\n0,0,0,0;0,inf,A\n"));
}

#[test]
fn stability_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "s.json", r#"{"stability": {"trials": 1}}"#);
    write(
        dir.path(),
        "z.json",
        r#"{"stability": {"trials": 1, "eps": 0.0}}"#,
    );
    for name in ["a.json", "b.json"] {
        let out = mather(
            dir.path(),
            &[
                "stability",
                "--config",
                "s.json",
                "--seed",
                "7",
                "--out",
                name,
            ],
        );
        assert_eq!(out.status.code(), Some(0));
    }
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b);
    let out = mather(
        dir.path(),
        &["stability", "--config", "z.json", "--out", "z.out"],
    );
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("z.out")).unwrap()).unwrap();
    assert_eq!(doc["data"]["results"][0]["identical_to_baseline"], true);
}
