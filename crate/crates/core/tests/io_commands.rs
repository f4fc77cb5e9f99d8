use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use abs_survival::io::{
    analyze, analyze_samples, diagnose_null, ingest_csv, load_analysis_config, simulate,
    AnalysisConfig, AnalysisReport, DiagnoseConfig, SimulateConfig,
};
use abs_survival::surv::Sample;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn kidney_config() -> AnalysisConfig {
    let mut cfg = load_analysis_config(&data("kidney.toml")).unwrap();
    cfg.n_resamples = 300;
    cfg.n_boot = 100;
    cfg
}

#[test]
fn kidney_ingestion_counts() {
    let cfg = kidney_config();
    let d = ingest_csv(&cfg.input, &cfg).unwrap();
    assert_eq!(d.labels, ["2".to_string(), "1".to_string()]);
    let (perc, surg) = (&d.sample1, &d.sample2);
    assert_eq!((surg.len(), perc.len()), (43, 76));
    // the surgical arm has 28 censored rows in the public data set
    assert_eq!((surg.n_censored(), perc.n_censored()), (28, 65));
    assert!(d.summary.rejected.is_empty());
}

#[test]
fn swapping_labels_flips_signed_measures_only() {
    let cfg = kidney_config();
    let d = ingest_csv(&cfg.input, &cfg).unwrap();
    let fwd = analyze_samples(["2", "1"], &d.sample1, &d.sample2, &cfg).unwrap();
    let rev = analyze_samples(["1", "2"], &d.sample2, &d.sample1, &cfg).unwrap();
    let est = |r: &AnalysisReport, m: &str| r.row(m).unwrap().estimate.unwrap();

    assert!((est(&fwd, "RMSTd") + est(&rev, "RMSTd")).abs() < 1e-10);
    assert!((est(&fwd, "HR") * est(&rev, "HR") - 1.0).abs() < 1e-9);
    for m in ["ABS", "ABSi_L", "ABSi_R"] {
        assert_eq!(fwd.row(m), rev.row(m), "{m}");
    }
}

#[test]
fn duplicated_group_shows_no_difference() {
    let s = Sample::from_pairs(&[
        (1.0, true),
        (2.0, false),
        (3.0, true),
        (5.0, true),
        (8.0, false),
    ])
    .unwrap();
    let cfg = AnalysisConfig {
        n_resamples: 50,
        n_boot: 20,
        ..Default::default()
    };
    let r = analyze_samples(["A", "B"], &s, &s, &cfg).unwrap();
    assert!((r.row("HR").unwrap().estimate.unwrap() - 1.0).abs() < 1e-9);
    assert!(r.row("RMSTd").unwrap().estimate.unwrap().abs() < 1e-12);
    assert_eq!(r.row("ABS").unwrap().estimate, Some(0.0));
    assert_eq!(r.row("MTd").unwrap().estimate, Some(0.0));
}

#[test]
fn analyze_writes_parseable_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = kidney_config();
    cfg.out_dir = dir.path().to_path_buf();
    let out = analyze(&cfg).unwrap();

    let csv = fs::File::open(dir.path().join("report.csv")).unwrap();
    assert_eq!(AnalysisReport::read_csv(csv).unwrap(), out.report);
    for row in &out.report.rows {
        if let Some(p) = row.p_value {
            assert!((0.0..=1.0).contains(&p));
        }
    }

    let curves = fs::read_to_string(dir.path().join("curves.csv")).unwrap();
    assert!(curves.starts_with("t,S1,S2,absdiff\n0.0,1.0,1.0,0.0\n"));
    let text = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(text.contains("ABSi_R"));
    assert!(text.contains("^c"));
}

#[test]
fn simulate_desk_grid_shape_and_rerun() {
    let run = |dir: &Path| {
        let cfg = SimulateConfig {
            situations: vec!["I".into()],
            preset: "desk".into(),
            iterations: Some(4),
            permutations: Some(20),
            seed: 9,
            out_dir: dir.to_path_buf(),
            ..Default::default()
        };
        simulate(&cfg).unwrap();
        fs::read(dir.join("study.csv")).unwrap()
    };
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = run(d1.path());
    assert_eq!(first, run(d2.path()));
    let text = String::from_utf8(first).unwrap();
    // header + 5 size pairs x 4 censoring rates x 4 tests
    assert_eq!(text.lines().count(), 1 + 5 * 4 * 4);
    assert!(d1.path().join("situation_I.txt").exists());
    assert!(d1.path().join("summary.txt").exists());
}

#[test]
fn diagnose_is_reproducible() {
    let run = |dir: &Path| {
        let cfg = DiagnoseConfig {
            draws: 60,
            bins: 10,
            seed: 4,
            out_dir: dir.to_path_buf(),
            ..Default::default()
        };
        diagnose_null(&cfg).unwrap();
        fs::read(dir.join("histogram.csv")).unwrap()
    };
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert_eq!(run(d1.path()), run(d2.path()));
}

fn abssurv(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_abssurv"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn cli_analyze_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = data("kidney.toml");
    let out = abssurv(&[
        "analyze",
        "--config",
        cfg.to_str().unwrap(),
        "--resamples",
        "100",
        "--seed",
        "3",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = AnalysisReport::read_csv(fs::File::open(dir.path().join("report.csv")).unwrap()).unwrap();
    assert_eq!(report.row("ABS").unwrap().resamples, Some(100));
    assert!(String::from_utf8_lossy(&out.stdout).contains("ABSi_L"));
}

#[test]
fn cli_failures_are_categorized() {
    let dir = tempfile::tempdir().unwrap();
    let bad_sim = dir.path().join("sim.toml");
    fs::write(&bad_sim, "situations = [\"VII\"]\n").unwrap();
    let out = abssurv(&["simulate", "--config", bad_sim.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error[config]:"), "{err}");
    assert!(err.contains("I, II, III, IV, V, VI"));

    let csv = dir.path().join("bad.csv");
    fs::write(&csv, "group,time,status\nA,1,1\nB,2,2\n").unwrap();
    let cfg = dir.path().join("a.toml");
    fs::write(&cfg, "input = \"bad.csv\"\n").unwrap();
    let out = abssurv(&["analyze", "--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error[input]:") && err.contains(":3:"), "{err}");

    let out = abssurv(&["diagnose-null", "--config", "/nonexistent.toml"]);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[config]:"));
}
