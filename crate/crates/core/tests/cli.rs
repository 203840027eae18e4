use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const SMALL: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/small.csv");
const GOLDEN: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/small_golden.json");

fn ovbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ovbound")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = ovbound(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn read_json(p: impl AsRef<Path>) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn fit(dir: &Path) -> PathBuf {
    let d = dir.to_str().unwrap();
    ok(&["fit", "--input", SMALL, "--outcome", "y", "--treatment", "x", "--out-dir", d]);
    dir.join("summary.json")
}

#[test]
fn fit_matches_the_golden_summary() {
    let dir = tempfile::tempdir().unwrap();
    let got = read_json(fit(dir.path()));
    let want = read_json(GOLDEN);
    for (k, w) in want.as_object().unwrap() {
        let (g, w) = (got[k].as_f64().unwrap(), w.as_f64().unwrap());
        assert!((g - w).abs() <= 1e-9 * w.abs().max(1.0), "{k}: {g} vs {w}");
    }
}

#[test]
fn missing_column_is_a_usage_error_naming_it() {
    let out = ovbound(&["fit", "--input", SMALL, "--outcome", "y", "--treatment", "treat"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("treat"));
}

#[test]
fn bad_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"stepp": 0.01}"#).unwrap();
    let out = ovbound(&["bounds", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("stepp"));

    let out = ovbound(&["bounds", "--input", SMALL, "--outcome", "y", "--treatment", "x", "--box", "0:1:rtilde"]);
    assert_eq!(out.status.code(), Some(2));
    let out = ovbound(&["delta-star", "--input", SMALL, "--outcome", "y", "--treatment", "x"]);
    assert_eq!(out.status.code(), Some(2), "no default R_max");
}

#[test]
fn summary_round_trip_is_lossless() {
    let dir = tempfile::tempdir().unwrap();
    let summary = fit(dir.path());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let common = ["--box", "0.01:0.99:rtilde:0.9", "--step", "0.02", "--format", "json"];
    let mut from_csv = vec!["bounds", "--input", SMALL, "--outcome", "y", "--treatment", "x", "--out-dir"];
    from_csv.push(a.to_str().unwrap());
    from_csv.extend(common);
    ok(&from_csv);
    let mut from_summary = vec!["bounds", "--summary-json", summary.to_str().unwrap(), "--out-dir"];
    from_summary.push(b.to_str().unwrap());
    from_summary.extend(common);
    ok(&from_summary);
    assert_eq!(read_json(a.join("quantiles.json")), read_json(b.join("quantiles.json")));
    assert_eq!(read_json(a.join("summary.json")), read_json(summary));
}

#[test]
fn two_boxes_give_two_output_sets() {
    let dir = tempfile::tempdir().unwrap();
    let summary = fit(dir.path());
    let out = dir.path().join("bounds");
    ok(&[
        "bounds",
        "--summary-json",
        summary.to_str().unwrap(),
        "--box",
        "0.01:0.99:rtilde:0.9",
        "--box",
        "1.01:3.99:rtilde:0.9",
        "--step",
        "0.05",
        "--format",
        "csv,json",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    for f in [
        "summary.json",
        "field_box1.csv",
        "field_box2.csv",
        "contour_box1.csv",
        "contour_box2.csv",
        "quantiles.csv",
        "quantiles.json",
        "manifest.json",
    ] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let manifest = read_json(out.join("manifest.json"));
    assert_eq!(manifest["boxes"].as_array().unwrap().len(), 2);
    assert!(manifest["runtime_secs"].as_f64().unwrap() > 0.0);
    let quantiles = std::fs::read_to_string(out.join("quantiles.csv")).unwrap();
    assert_eq!(quantiles.lines().count(), 1 + 4, "bias and effect rows for each box");
}

#[test]
fn every_command_writes_its_files() {
    let dir = tempfile::tempdir().unwrap();
    let summary = fit(dir.path());
    let s = summary.to_str().unwrap();
    let cases: [(&[&str], &[&str]); 3] = [
        (&["delta-star", "--rmax", "0.9", "--rmax", "1.0"], &["delta_star.csv"]),
        (&["id-sets", "--rmax", "0.9"], &["id_sets.csv", "sets_and_delta_star.csv"]),
        (&["sweep", "--box", "0.01:0.99:rtilde:0.9", "--steps", "1/10,1/20"], &["sweep.csv"]),
    ];
    for (k, (args, files)) in cases.iter().enumerate() {
        let out = dir.path().join(k.to_string());
        let mut full = args.to_vec();
        full.extend(["--summary-json", s, "--out-dir", out.to_str().unwrap()]);
        ok(&full);
        for f in *files {
            assert!(out.join(f).is_file(), "{args:?} {f}");
        }
    }
}

#[test]
fn simulate_is_reproducible_from_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("dgp.json");
    std::fs::write(
        &spec,
        r#"{"n": 500, "beta_true": 1.0, "psi": [0.8, -0.5], "control_variances": [1.0, 2.0],
            "confounder_variance": 1.5, "alpha1": 0.6, "delta1": 0.4, "noise_variance": 1.0,
            "treatment_noise_variance": 1.0, "seed": 1}"#,
    )
    .unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        ok(&["simulate", "--dgp", spec.to_str().unwrap(), "--seed", "9", "--out-dir", out.to_str().unwrap()]);
        assert!(out.join("truth.json").is_file());
        std::fs::read(out.join("data.csv")).unwrap()
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn config_file_values_are_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let summary = fit(dir.path());
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        serde_json::json!({
            "summary_json": summary,
            "boxes": ["0.01:0.99:rtilde:0.9"],
            "step": 0.1,
            "formats": ["json"],
        })
        .to_string(),
    )
    .unwrap();
    let cells = |extra: &[&str]| {
        let out = dir.path().join(extra.len().to_string());
        let mut args = vec!["bounds", "--config", cfg.to_str().unwrap(), "--out-dir", out.to_str().unwrap()];
        args.extend(extra);
        ok(&args);
        read_json(out.join("manifest.json"))["boxes"][0]["cells"].as_u64().unwrap()
    };
    assert!(cells(&["--step", "0.05"]) > cells(&[]));
}
