use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use alifs::config::BurnInSetting;
use alifs::report::{CheckStatus, Report};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn alifs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_alifs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, sub: &str, cfg: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        sub,
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    alifs(&args)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn status_of(r: &Report, name: &str) -> CheckStatus {
    r.checks
        .iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("no check {name}"))
        .status
}

#[test]
fn subcommands_write_their_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("arch.toml");

    let o = run_in(dir.path(), "analyze", &cfg, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = Report::read(dir.path()).unwrap();
    assert_eq!(r.command, "analyze");
    assert!(r.empirical.is_none());
    assert!(dir.path().join("rho_grid.csv").exists());

    let o = run_in(
        dir.path(),
        "simulate",
        &cfg,
        &["--samples", "20000", "--threads", "2"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let bin = std::fs::read(dir.path().join("samples.bin")).unwrap();
    assert_eq!(bin.len(), 8 * 20_000);
    let curve = std::fs::read_to_string(dir.path().join("tailcurve.csv")).unwrap();
    assert_eq!(
        curve.lines().next().unwrap(),
        "threshold,left,right,ci_lo,ci_hi"
    );
    let r = Report::read(dir.path()).unwrap();
    let ac = &r.empirical.as_ref().unwrap().autocorrelation;
    assert_eq!(ac.iter().map(|a| a.0).collect::<Vec<_>>(), [1, 2, 5, 10]);
    assert!(ac.iter().all(|a| a.1.is_some_and(|r| r.abs() < 1.0)));

    let o = run_in(dir.path(), "verify", &cfg, &["--samples", "20000"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = Report::read(dir.path()).unwrap();
    assert_eq!(status_of(&r, "expected_kappa"), CheckStatus::Pass);
    assert!(r.verdict.unwrap().ok);
    let written = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert_eq!(r.to_json(), written);

    std::fs::remove_file(dir.path().join("checks.csv")).unwrap();
    let o = alifs(&["report", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("[PASS] expected_kappa (required)"), "{text}");
    assert!(dir.path().join("checks.csv").exists());
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let cfg = config("two_tailed.toml");
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, threads) in [(&a, "1"), (&b, "3")] {
        let o = run_in(
            dir.path(),
            "simulate",
            &cfg,
            &["--samples", "30000", "--threads", threads],
        );
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for file in ["report.json", "samples.bin", "tailcurve.csv"] {
        let x = std::fs::read(a.path().join(file)).unwrap();
        let y = std::fs::read(b.path().join(file)).unwrap();
        assert!(x == y, "{file} differs");
    }
}

#[test]
fn zero_samples_give_a_valid_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        dir.path(),
        "verify",
        &config("arch.toml"),
        &["--samples", "0"],
    );
    assert_ne!(o.status.code(), Some(2), "{}", stderr(&o));
    let r = Report::read(dir.path()).unwrap();
    let e = r.empirical.unwrap();
    assert_eq!(e.n, 0);
    assert!(e.hill.iter().all(Option::is_none));
    assert_eq!(
        std::fs::read(dir.path().join("samples.bin")).unwrap().len(),
        0
    );
}

#[test]
fn unwritable_output_directory_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain");
    std::fs::write(&file, b"x").unwrap();
    let o = run_in(&file.join("sub"), "analyze", &config("arch.toml"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("creating"), "{}", stderr(&o));
}

#[test]
fn config_errors_carry_positions() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "seed = 1\n[simulate]\nsampels = 10\n[model]\nfamily = \"arch1\"\nbeta = 1.0\nlambda = 1.0\nz = { dist = \"gaussian\", mean = 0.0, sd = 1.0 }\n").unwrap();
    let o = run_in(dir.path(), "analyze", &bad, &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("bad.toml:3:"), "{err}");
    assert!(err.contains("sampels"), "{err}");

    let o = alifs(&[
        "analyze",
        "--config",
        config("arch.toml").to_str().unwrap(),
        "--theta-grid",
        "3:1:5",
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn grid_and_burn_in_flags_apply() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        dir.path(),
        "simulate",
        &config("arch.toml"),
        &[
            "--samples",
            "1000",
            "--burn-in",
            "50",
            "--theta-grid",
            "0:3:31",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let r = Report::read(dir.path()).unwrap();
    assert_eq!(r.analysis.unwrap().rho_grid.len(), 31);
    let e = r.empirical.unwrap();
    assert!(e
        .diagnostics
        .iter()
        .all(|d| d.burn_in == 50 && !d.certified));
    assert_eq!(r.config.simulate.burn_in, BurnInSetting::Fixed(50));
}

#[test]
fn wrong_expectation_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("wrong.toml");
    let text = std::fs::read_to_string(config("arch.toml"))
        .unwrap()
        .replace("kappa = 2.0", "kappa = 2.5");
    std::fs::write(&cfg, text).unwrap();
    let o = run_in(dir.path(), "verify", &cfg, &["--samples", "5000"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let r = Report::read(dir.path()).unwrap();
    assert_eq!(status_of(&r, "expected_kappa"), CheckStatus::Fail);
}

#[test]
fn lattice_tail_is_not_covered() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        dir.path(),
        "verify",
        &config("two_tailed.toml"),
        &["--samples", "50000"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let r = Report::read(dir.path()).unwrap();
    assert_eq!(
        status_of(&r, "hill_left"),
        CheckStatus::PredictionNotCovered
    );
    assert_eq!(
        status_of(&r, "c_minus_positive"),
        CheckStatus::PredictionNotCovered
    );
    let p = r.analysis.unwrap().prediction.unwrap();
    assert!(!p.tails[0].covered && p.tails[1].covered);
}
