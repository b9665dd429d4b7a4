//! End-to-end checks of the command-line binary.

use std::path::Path;
use std::process::{Command, Output};

use propeq::harness::output;

fn propeq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_propeq"))
        .args(args)
        .output()
        .expect("spawn propeq")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_noiseless_identity_config_recovers_true_ddm() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("identity.json");
    std::fs::write(
        &cfg,
        r#"{"channel": {"propellers": [{"shape": {"type": "sine_ripple", "beta": 0.0}, "f_p": 30.0}], "snr_db": null}}"#,
    )
    .unwrap();
    let csv = dir.path().join("run.csv");
    let o = propeq(&[
        "simulate",
        "--config",
        path_str(&cfg),
        "--out",
        path_str(&csv),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("ddm_eq   -0.200000000"));
    let runs = output::read_csv(&csv).unwrap();
    assert_eq!(runs.len(), 1);
    assert!((runs[0].ddm_raw + 0.2).abs() < 1e-9);
}

#[test]
fn simulate_annotates_blind_spot() {
    let o = propeq(&["simulate", "--fp", "22.5", "--noiseless"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("blind spot at 90 Hz"));
}

#[test]
fn sweep_writes_csv_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let svg = dir.path().join("sweep.svg");
    let o = propeq(&[
        "sweep",
        "--fp-start",
        "20",
        "--fp-stop",
        "23",
        "--fp-step",
        "0.5",
        "--seeds",
        "2",
        "--out",
        path_str(&csv),
        "--plot",
        path_str(&svg),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), output::CSV_HEADER);
    assert_eq!(text.lines().count(), 1 + 7 * 2);
    let plot = std::fs::read_to_string(&svg).unwrap();
    assert!(plot.starts_with("<svg") || plot.starts_with("<?xml"));
    assert!(plot.contains("blind spot at 22.5 Hz"));
}

#[test]
fn spectrum_dump_covers_every_bin() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mod.csv");
    let o = propeq(&[
        "spectrum",
        "--stage",
        "modulator",
        "--fp",
        "30",
        "--out",
        path_str(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "freq_hz,re,im,mag_db");
    assert_eq!(lines.count(), 32_000);
}

#[test]
fn blindspots_reports_both_known_speeds() {
    let o = propeq(&["blindspots"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("f_p = 22.5 Hz: modulator component at 90 Hz"));
    assert!(text.contains("f_p = 37.5 Hz: modulator component at 150 Hz"));
}

#[test]
fn bad_config_exits_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"unknown_field": 1}"#).unwrap();
    let o = propeq(&["simulate", "--config", path_str(&cfg)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));

    std::fs::write(
        &cfg,
        r#"{"tone_band": {"center_hz": 1500.0, "half_width_hz": 20000.0}}"#,
    )
    .unwrap();
    assert_eq!(
        propeq(&["simulate", "--config", path_str(&cfg)])
            .status
            .code(),
        Some(1)
    );

    assert_eq!(
        propeq(&["simulate", "--config", "/nonexistent/cfg.json"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(propeq(&["sweep", "--bogus"]).status.code(), Some(1));
}
