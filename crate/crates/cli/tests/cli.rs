use std::path::Path;
use std::process::Command;

use juggle::config::{parse_config, Overrides};
use juggle::export::{
    export_run, load_steps, load_summary, load_trajectory, read_steps, step_rows, write_steps,
};
use juggle::reports::{fixed_point_report, sweep, SweepGrid};
use juggle_core::sim::{run_closed_loop, SimConfig};
use std::f64::consts::PI;

fn juggle() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_juggle"));
    c.env_remove(juggle::OUT_DIR_ENV);
    c
}

#[test]
fn partial_config_keeps_defaults() {
    let cfg =
        parse_config(r#"{ "n_steps": 7, "rng_seed": 5, "params": { "mass": 0.2 } }"#).unwrap();
    let d = SimConfig::default();
    assert_eq!(cfg.n_steps, 7);
    assert_eq!(cfg.seed, Some(5));
    assert_eq!(cfg.params.mass, 0.2);
    assert_eq!(cfg.params.length, d.params.length);
    assert_eq!(cfg.spec, d.spec);
    assert!(parse_config(r#"{ "n_step": 7 }"#).is_err());
}

#[test]
fn config_round_trips_through_json() {
    let cfg = SimConfig {
        seed: Some(9),
        noise: Some(Default::default()),
        ..SimConfig::default()
    };
    let text = serde_json::to_string(&cfg).unwrap();
    assert_eq!(parse_config(&text).unwrap(), cfg);
}

#[test]
fn overrides_replace_flight_time_choice() {
    let mut cfg = SimConfig::default();
    Overrides {
        p: Some(2.0),
        noise: true,
        seed: Some(1),
        ..Overrides::default()
    }
    .apply(&mut cfg);
    assert_eq!(cfg.spec.p, Some(2.0));
    assert_eq!(cfg.spec.delta_star, None);
    assert!(cfg.noise.is_some());
    let fp = fixed_point_report(&cfg).unwrap().fixed_point;
    assert!((fp.p() - 2.0).abs() < 1e-12);
}

#[test]
fn csv_round_trip_is_exact() {
    let cfg = SimConfig {
        noise: Some(Default::default()),
        seed: Some(42),
        n_steps: 25,
        ..SimConfig::default()
    };
    let log = run_closed_loop(&cfg).unwrap();
    let rows = step_rows(&log);
    let mut buf = Vec::new();
    write_steps(&rows, &mut buf).unwrap();
    assert_eq!(read_steps(buf.as_slice()).unwrap(), rows);
}

#[test]
fn exported_run_reads_back() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SimConfig {
        n_steps: 30,
        render_samples_per_flight: 12,
        ..SimConfig::default()
    };
    let log = run_closed_loop(&cfg).unwrap();
    let paths = export_run(&log, &dir.path().join("nested")).unwrap();

    let steps = load_steps(&paths.steps).unwrap();
    assert_eq!(steps, step_rows(&log));
    for r in &steps[20..] {
        assert!((r.delta_alpha - 2.0 * PI / 3.0).abs() < 1e-6);
        assert!((r.delta - 0.6).abs() < 1e-6);
    }

    let traj = load_trajectory(&paths.trajectory).unwrap();
    assert_eq!(traj.len(), 30 * 12);
    for flight in traj.chunks(12) {
        assert!((flight[0].beta - PI / 3.0).abs() < 1e-12);
        assert!((flight[11].beta - PI / 3.0).abs() < 1e-9);
    }

    let summary = load_summary(&paths.summary).unwrap();
    assert_eq!(summary.config, cfg);
    assert_eq!(summary.fixed_point, log.fixed_point);
    assert_eq!(summary.metrics, log.summary);
}

#[test]
fn steady_run_has_constant_precession_column() {
    let base = SimConfig::default();
    let fp = fixed_point_report(&base).unwrap().fixed_point;
    let cfg = SimConfig {
        initial_state: fp.y_star,
        ..base
    };
    let rows = step_rows(&run_closed_loop(&cfg).unwrap());
    for r in rows {
        assert!((r.delta_alpha - 2.0 * PI / 3.0).abs() < 1e-9);
    }
}

#[test]
fn sweep_is_ordered_and_flags_infeasible_points() {
    let grid = SweepGrid {
        beta_star: vec![0.5, PI / 3.0],
        delta_star: vec![0.05, 0.6],
        delta_alpha_star: vec![PI / 2.0, PI],
    };
    let rows = sweep(&SimConfig::default(), &grid);
    assert_eq!(rows.len(), 8);
    assert_eq!(rows, sweep(&SimConfig::default(), &grid));
    let mut i = 0;
    for &b in &grid.beta_star {
        for &d in &grid.delta_star {
            for &a in &grid.delta_alpha_star {
                let r = &rows[i];
                assert_eq!((r.beta_star, r.delta_star, r.delta_alpha_star), (b, d, a));
                assert_eq!(r.feasible, d == 0.6);
                if r.feasible {
                    assert_eq!(r.controllability_rank, Some(8));
                    assert!(r.spectral_radius.unwrap() < 1.0);
                } else {
                    assert!(r.error.is_some());
                }
                i += 1;
            }
        }
    }
}

fn json(out: &std::process::Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn binary_reports_and_exit_codes() {
    let fp = json(&juggle().arg("fixed-point").output().unwrap());
    assert!((fp["fixed_point"]["y_star"]["beta_dot"].as_f64().unwrap() - 1.8506).abs() < 1e-3);

    let gains = json(&juggle().args(["gains", "--p", "1.5"]).output().unwrap());
    assert_eq!(gains["controllability_rank"], 8);
    assert!(gains["closed_loop_spectral_radius"].as_f64().unwrap() < 1.0);

    let out = juggle()
        .args(["fixed-point", "--delta", "0.01"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = juggle()
        .args(["fixed-point", "--config", "/nonexistent/cfg.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{ "initial_state": { "h": [0.9, -0.2, 1.2], "v": [1.3, 0.2, -1.7], "alpha_dot": 2.2, "beta_dot": 300.0 } }"#).unwrap();
    let out = juggle()
        .args(["simulate", "--out-dir"])
        .arg(dir.path().join("o"))
        .arg("--config")
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn simulate_honours_out_dir_variable() {
    let dir = tempfile::tempdir().unwrap();
    let out = juggle()
        .args([
            "simulate", "--noise", "--seed", "7", "--steps", "12", "--render", "3",
        ])
        .env(juggle::OUT_DIR_ENV, dir.path())
        .output()
        .unwrap();
    let report = json(&out);
    assert_eq!(report["summary"]["n_steps"], 12);
    for f in ["steps.csv", "trajectory.csv", "summary.json"] {
        assert!(Path::new(&dir.path().join(f)).exists());
    }
    assert_eq!(load_steps(&dir.path().join("steps.csv")).unwrap().len(), 12);
    assert_eq!(
        load_summary(&dir.path().join("summary.json")).unwrap().seed,
        Some(7)
    );
}

#[test]
fn sweep_and_precess_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let out = juggle()
        .args([
            "sweep",
            "--betas",
            "0.8,1.0",
            "--deltas",
            "0.6",
            "--dalphas",
            "2.0",
            "--out-dir",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    let rows = json(&out);
    assert_eq!(rows.as_array().unwrap().len(), 2);
    assert!(dir.path().join("sweep.csv").exists());

    let out = juggle()
        .args(["precess", "--beta", "0.9", "--p", "2", "--compare", "1e-4"])
        .output()
        .unwrap();
    let rep = json(&out);
    assert!(rep["max_residual"].as_f64().unwrap() < 1e-12);
    assert!(rep["check"]["relative"]
        .as_array()
        .unwrap()
        .iter()
        .all(|x| x.as_f64().unwrap() < 1e-3));
}
