use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hylab::reference::{build_packet, default_plane, particle_centers, sample_density_plane};
use hylab::{AtomParams, PacketSpec};
use hylab_cli::csv::Table;
use hylab_cli::snapshot::{Payload, Snapshot};
use hylab_cli::{load_scenario, run, ConfigError, RunManifest};

fn hylab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hylab")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn out_arg(dir: &Path) -> String {
    dir.display().to_string()
}

const SMALL_ORACLE: &str = r#""oracle": {"half_width": [30, 20], "points": [384, 256], "total_time": 20}"#;

/// Files whose bytes must not depend on the run (the manifest echoes the output path).
fn data_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("csv" | "bin" | "svg" | "md")))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn identical_configs_give_identical_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let configs = [
        ("qr.json", r#"{"kind": "quantum-reference", "horizon": 3, "packet": {"plane_points": 101}}"#.to_string()),
        ("eh.json", r#"{"kind": "hybrid", "mass_ratio": 100, "law": "ehrenfest", "horizon": 1, "hybrid": {"model": "soft-core"}}"#.to_string()),
        ("or.json", format!(r#"{{"kind": "oracle", {SMALL_ORACLE}}}"#)),
    ];
    for (name, body) in &configs {
        let cfg = write_config(tmp.path(), name, body);
        let runs: Vec<PathBuf> = (0..2).map(|k| tmp.path().join(format!("{name}-{k}"))).collect();
        for dir in &runs {
            let out = hylab(&["run", cfg.to_str().unwrap(), "--out", &out_arg(dir)]);
            assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        }
        let (a, b) = (data_files(&runs[0]), data_files(&runs[1]));
        assert!(a.iter().any(|(n, _)| n.ends_with(".csv")), "{name}: no CSV written");
        assert_eq!(a.len(), b.len());
        for ((na, ba), (nb, bb)) in a.iter().zip(&b) {
            assert_eq!(na, nb);
            assert!(ba == bb, "{name}: {na} differs between identical runs");
        }
    }
}

#[test]
fn config_round_trips_through_a_file() {
    let tmp = tempfile::tempdir().unwrap();
    for kind in ["quantum-reference", "hybrid", "oracle", "compare"] {
        let first = write_config(tmp.path(), "a.json", &format!(r#"{{"kind": "{kind}", "stride": 2}}"#));
        let c = load_scenario(&first, &["packet.sigma_n=1.1".into()]).unwrap();
        let echoed = write_config(tmp.path(), "b.json", &serde_json::to_string_pretty(&c).unwrap());
        assert_eq!(load_scenario(&echoed, &[]).unwrap(), c);
        assert_eq!(c.packet.sigma_n, 1.1);
    }
    // `validate` prints the resolved config, which loads back to itself
    let out = hylab(&["validate", first_path(tmp.path()).to_str().unwrap()]);
    assert!(out.status.success());
    let printed = write_config(tmp.path(), "c.json", &String::from_utf8(out.stdout).unwrap());
    assert_eq!(load_scenario(&printed, &[]).unwrap(), load_scenario(&first_path(tmp.path()), &[]).unwrap());
}

fn first_path(dir: &Path) -> PathBuf {
    dir.join("a.json")
}

#[test]
fn validation_and_parse_errors_are_distinct_and_name_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write_config(tmp.path(), "bad.json", r#"{"kind": "quantum-reference", "packet": {"n_bar": 0}}"#);
    let e = load_scenario(&bad, &[]).unwrap_err();
    assert!(matches!(e, ConfigError::Validation { .. }));
    assert_eq!(e.field(), "packet.n_bar");
    let out = hylab(&["run", bad.to_str().unwrap(), "--out", &out_arg(&tmp.path().join("never"))]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("validation error") && stderr.contains("packet.n_bar"), "{stderr}");
    assert!(!tmp.path().join("never").exists());

    let malformed = write_config(tmp.path(), "m.json", r#"{"kind": "hybrid", "packet": {"n_bar": 60,}}"#);
    assert!(matches!(load_scenario(&malformed, &[]), Err(ConfigError::Parse { .. })));
    let out = hylab(&["validate", malformed.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));

    let typo = write_config(tmp.path(), "t.json", r#"{"kind": "hybrid", "hybrid": {"proton_mometum": [0, 0, 0]}}"#);
    let e = load_scenario(&typo, &[]).unwrap_err();
    assert!(matches!(e, ConfigError::Parse { .. }));
    assert!(e.to_string().contains("proton_mometum"), "{e}");

    let out = hylab(&["validate", bad.to_str().unwrap(), "--override", "packet.n_bar=40"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(matches!(load_scenario(&tmp.path().join("missing.json"), &[]), Err(ConfigError::Io { .. })));
}

#[test]
fn quantum_reference_manifest_reports_the_revival_ratio() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg =
        write_config(tmp.path(), "qr.json", r#"{"kind": "quantum-reference", "plots": false, "snapshots": false}"#);
    let out = hylab(&["run", cfg.to_str().unwrap(), "--out", &out_arg(&tmp.path().join("qr"))]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = RunManifest::read(&tmp.path().join("qr")).unwrap();
    assert!(m.succeeded());
    assert_eq!(m.quantity("t_rev_over_t_kepler"), Some(20.0));
    assert_eq!(m.config.packet.n_bar, 60.0);
    assert!(m.decisions.iter().any(|d| d.starts_with("coulomb-singularity")));
    assert_eq!(m.unit_system, hylab_cli::manifest::UNIT_SYSTEM);
    let table = Table::parse(&std::fs::read_to_string(tmp.path().join("qr/trajectory.csv")).unwrap()).unwrap();
    assert_eq!(table.schema, "quantum-reference");
    assert_eq!(table.columns[0], ("t".to_string(), "au_time".to_string()));
    // 40 Kepler periods at 64 samples each
    assert_eq!(table.rows.len(), 40 * 64 + 1);
}

#[test]
fn adiabatic_hybrid_manifest_shows_a_motionless_proton() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "hy.json", r#"{"kind": "hybrid", "horizon": 3, "plots": false}"#);
    let dir = tmp.path().join("hy");
    let out = hylab(&["run", cfg.to_str().unwrap(), "--out", &out_arg(&dir), "--stride", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = RunManifest::read(&dir).unwrap();
    assert_eq!(m.quantity("proton_displacement"), Some(0.0));
    assert!(m.quantity("momentum_excursion").unwrap() > 0.0);
    assert!(m.quantity("momentum_excursion_over_scale").unwrap() >= 0.5);
    assert_eq!(m.config.stride, 4);
    let table = Table::parse(&std::fs::read_to_string(dir.join("trajectory.csv")).unwrap()).unwrap();
    assert_eq!(table.rows.len(), 3 * 64 / 4 + 1);
    assert!(table.column("r_p_x").unwrap().iter().all(|v| *v == 0.0));
}

#[test]
fn aborted_runs_leave_an_incomplete_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    // a packet started against the box edge leaks through the boundary band
    let body = r#"{"kind": "oracle", "oracle": {"half_width": [30, 20], "points": [384, 256],
        "relative": {"kind": "gaussian", "center": 27, "width": 1, "momentum": 0}, "total_time": 5}}"#;
    let cfg = write_config(tmp.path(), "leak.json", body);
    let dir = tmp.path().join("leak");
    let out = hylab(&["run", cfg.to_str().unwrap(), "--out", &out_arg(&dir)]);
    assert_eq!(out.status.code(), Some(1));
    let m = RunManifest::read(&dir).unwrap();
    assert!(!m.complete && !m.succeeded());
    assert!(m.error.as_deref().unwrap().contains("boundary"), "{:?}", m.error);

    let out = hylab(&["report", &out_arg(&dir)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("incomplete"));
}

#[test]
fn failed_invariants_exit_nonzero() {
    let tmp = tempfile::tempdir().unwrap();
    // a coarse Ehrenfest step misses the energy budget
    let body = r#"{"kind": "hybrid", "mass_ratio": 1, "law": "ehrenfest", "horizon": 2, "plots": false,
        "hybrid": {"model": "soft-core", "steps_per_period": 1000}}"#;
    let cfg = write_config(tmp.path(), "coarse.json", body);
    let dir = tmp.path().join("coarse");
    let out = hylab(&["run", cfg.to_str().unwrap(), "--out", &out_arg(&dir)]);
    let m = RunManifest::read(&dir).unwrap();
    assert!(m.complete);
    let energy = m.invariant("relative energy drift").unwrap();
    assert!(!energy.passed, "{energy:?}");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invariant failed"));
}

#[test]
fn report_merges_manifests() {
    let tmp = tempfile::tempdir().unwrap();
    let mut dirs = Vec::new();
    for (name, body) in [
        ("qr", r#"{"kind": "quantum-reference", "horizon": 2, "plots": false, "snapshots": false}"#.to_string()),
        ("cmp", format!(r#"{{"kind": "compare", "plots": false, "snapshots": false, {SMALL_ORACLE}}}"#)),
    ] {
        let mut c = hylab_cli::parse_scenario(&body, name, &[]).unwrap();
        c.output_dir = Some(tmp.path().join(name));
        assert!(run(&c).unwrap().succeeded());
        dirs.push(tmp.path().join(name));
    }
    let args: Vec<String> = std::iter::once("report".to_string()).chain(dirs.iter().map(|d| out_arg(d))).collect();
    let out = hylab(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.contains("| ok |")).count(), 2, "{text}");
    assert!(text.contains("discrepancy_ratio = inf"), "{text}");
    for aspect in ["electron dynamics", "proton dynamics", "conservation of total momentum"] {
        assert!(text.contains(aspect), "{text}");
    }
    let m = RunManifest::read(&dirs[1]).unwrap();
    assert_eq!(m.verdicts.len(), 3);
    assert!(m.quantity("discrepancy_ratio").unwrap().is_infinite());

    let file = tmp.path().join("table.md");
    assert!(hylab(&["report", &out_arg(&dirs[0]), "--out", &out_arg(&file)]).status.success());
    assert!(std::fs::read_to_string(&file).unwrap().contains("quantum-reference"));
    assert_eq!(hylab(&["report", &out_arg(&tmp.path().join("nothing"))]).status.code(), Some(1));
}

#[test]
fn single_state_snapshot_is_the_sampled_ring() {
    let tmp = tempfile::tempdir().unwrap();
    let body =
        r#"{"kind": "quantum-reference", "horizon": 1, "packet": {"n_bar": 12, "sigma_n": 1e-6, "plane_points": 121}}"#;
    let mut c = hylab_cli::parse_scenario(body, "ring", &[]).unwrap();
    c.output_dir = Some(tmp.path().to_path_buf());
    run(&c).unwrap();
    let snap = Snapshot::read(&tmp.path().join("relative_density_t0.bin")).unwrap();
    let params = AtomParams::hydrogen();
    let packet = build_packet(&PacketSpec::new(12.0, 1e-6, 10.0).unwrap(), &params).unwrap();
    let want = sample_density_plane(&packet, 0.0, &default_plane(&packet, 121).unwrap()).unwrap();
    assert_eq!(snap.dims, vec![121, 121]);
    assert_eq!(snap.meta.axes[1].spacing, want.geometry.dx);
    let Payload::Real(values) = snap.payload else { panic!("density snapshots are real") };
    assert_eq!(values, want.values);
    let svg = std::fs::read_to_string(tmp.path().join("relative_density_t0.svg")).unwrap();
    assert!(svg.contains("x [bohr]") && svg.contains("<rect"));
}

#[test]
fn proton_heatmap_is_nearly_structureless() {
    // For a proton image offset a = |<r_p>| blurred by σ_com, the contrast on the
    // circle of radius a is a²/σ² to leading order.
    let tmp = tempfile::tempdir().unwrap();
    let params = AtomParams::hydrogen();
    let packet = build_packet(&PacketSpec::default(), &params).unwrap();
    let a = particle_centers(&packet.relative_center(0.0), &params).1.norm();
    for sigma in [10.0, 20.0] {
        let body = format!(r#"{{"kind": "quantum-reference", "horizon": 1, "packet": {{"sigma_com": {sigma}}}}}"#);
        let mut c = hylab_cli::parse_scenario(&body, "contrast", &[]).unwrap();
        let dir = tmp.path().join(format!("s{sigma}"));
        c.output_dir = Some(dir.clone());
        let m = run(&c).unwrap();
        let proton = m.quantity("proton_azimuthal_contrast").unwrap();
        let electron = m.quantity("electron_azimuthal_contrast").unwrap();
        assert!(electron > 0.99 && proton < 0.03 * electron);
        if sigma == 10.0 {
            // above the 1% mark at the default width
            let lead = a * a / (sigma * sigma);
            assert!((proton / lead - 1.0).abs() < 0.02, "{proton} vs {lead}");
            assert!(proton > 0.01);
        } else {
            // the plane spacing grows with σ, so only the bound is sharp here
            assert!(proton < 0.01, "{proton}");
        }
        assert!(dir.join("proton_density_t0.svg").exists() && dir.join("electron_density_t0.svg").exists());
    }
}
