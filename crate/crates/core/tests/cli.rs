use std::path::Path;
use std::process::{Command, Output};

use esdg::cli::output::Table;
use esdg::state::COMPONENT_NAMES;

fn esdg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_esdg"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn run_brio_wu(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", "--case", "brio_wu", "--cells", "40", "--t-final", "0.02", "--snapshots", "3", "--out"];
    let o = out.to_str().unwrap();
    args.push(o);
    args.extend_from_slice(extra);
    esdg(&args)
}

#[test]
fn unknown_case_is_a_usage_error_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never");
    let r = esdg(&["run", "--case", "nope", "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("nope"));
    assert!(!out.exists());

    let r = esdg(&["run", "--case", "brio_wu", "--order", "7", "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn bad_flags_and_help() {
    assert_eq!(esdg(&["run", "--case", "brio_wu", "--frobnicate"]).status.code(), Some(1));
    assert_eq!(esdg(&["launch"]).status.code(), Some(1));
    assert_eq!(esdg(&["--help"]).status.code(), Some(0));
}

#[test]
fn run_writes_manifest_series_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bw");
    let r = run_brio_wu(&out, &[]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));

    let manifest = std::fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("case = brio_wu"));
    assert!(manifest.contains("status = ok"));

    let series = Table::read(&out.join("timeseries.csv")).unwrap();
    assert_eq!(series.columns[..4], ["t", "dt", "total_fluid_entropy", "total_em_entropy"]);
    for name in COMPONENT_NAMES {
        assert!(series.columns.iter().any(|c| c == &format!("int_{name}")));
    }
    let t = series.column("t").unwrap();
    assert_eq!(t[0], 0.0);
    assert_eq!(*t.last().unwrap(), 0.02);
    assert!(t.windows(2).all(|w| w[1] > w[0]));

    let mut snaps: Vec<_> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_str().unwrap().starts_with("snapshot_"))
        .collect();
    snaps.sort();
    assert_eq!(snaps.len(), 3);
    snaps.push(out.join("final.csv"));
    for p in &snaps {
        let text = std::fs::read_to_string(p).unwrap();
        let table = Table::parse(&text).unwrap();
        assert_eq!(table.rows.len(), 40 * 2);
        assert_eq!(table.columns.len(), 1 + 18 + 6);
        // Reload and rewrite must reproduce the file byte for byte.
        let copy = dir.path().join("copy.csv");
        table.write(&copy).unwrap();
        assert_eq!(std::fs::read(&copy).unwrap(), text.as_bytes());
    }
    let last = Table::read(&out.join("final.csv")).unwrap();
    assert_eq!(last.meta("t"), Some("2e-2"));
}

#[test]
fn serial_runs_are_bitwise_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run_brio_wu(&a, &["--serial"]).status.code(), Some(0));
    assert_eq!(run_brio_wu(&b, &["--serial"]).status.code(), Some(0));
    for f in ["final.csv", "timeseries.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn manifest_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let first = dir.path().join("first");
    std::fs::write(
        &cfg,
        format!(
            "case = brio_wu\ncells = 20\nt_final = 0.01\n[brio_wu]\ncfl = 0.1\nserial = true\nout = {}\n",
            first.display()
        ),
    )
    .unwrap();
    assert_eq!(esdg(&["run", "--config", cfg.to_str().unwrap()]).status.code(), Some(0));
    let manifest = std::fs::read_to_string(first.join("manifest.txt")).unwrap();
    assert!(manifest.contains("cfl = 1e-1"));

    // The manifest is itself a valid config; rerun it elsewhere.
    let second = dir.path().join("second");
    let r = esdg(&["run", "--config", first.join("manifest.txt").to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(std::fs::read(first.join("final.csv")).unwrap(), std::fs::read(second.join("final.csv")).unwrap());

    std::fs::write(&cfg, "case = brio_wu\ncolour = red\n").unwrap();
    assert_eq!(esdg(&["run", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn runtime_failure_exits_2_and_dumps_state() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("blowup");
    // No limiting at all and a huge step: the shock tube must break down.
    let r = esdg(&[
        "run", "--case", "brio_wu", "--cells", "40", "--cfl", "0.95", "--source-cfl", "0",
        "--slope-limiter", "false", "--out", out.to_str().unwrap(), "--max-steps", "400",
    ]);
    assert_eq!(r.status.code(), Some(2), "{}", String::from_utf8_lossy(&r.stderr));
    let dump = Table::read(&out.join("failure_state.csv")).unwrap();
    assert_eq!(dump.rows.len(), 80);
    let manifest = std::fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("status = failed"));
}

#[test]
fn sweep_writes_convergence_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep");
    let r = esdg(&[
        "sweep", "--case", "cp_waves", "--order", "1,2", "--cells", "8,16", "--quantity", "By",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let t = Table::read(&out.join("convergence.csv")).unwrap();
    assert_eq!(t.columns, ["k", "order", "cells", "l1_By", "rate_By", "nodesum_By"]);
    assert_eq!(t.rows.len(), 4);
    let rate = t.column("rate_By").unwrap();
    assert!(rate[0].is_nan() && rate[1] > 1.0 && rate[3] > 2.0);

    let r = esdg(&["sweep", "--case", "brio_wu", "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
}

#[test]
fn verify_reports_every_suite() {
    let r = esdg(&["verify", "--samples", "300"]);
    assert_eq!(r.status.code(), Some(0));
    let text = String::from_utf8_lossy(&r.stdout);
    for suite in ["sbp_identities", "ec_identity_fluid", "llf_entropy_stability", "recovery_roundtrip", "eigen_validation"] {
        assert!(text.lines().any(|l| l.starts_with("PASS") && l.contains(suite)), "{suite}: {text}");
    }
}
