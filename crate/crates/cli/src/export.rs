//! Run artifacts: `steps.csv`, `trajectory.csv` and `summary.json`.
//!
//! Floats are written with 17 significant digits so every value parses back
//! to the same `f64`.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use juggle_core::sim::{SimConfig, SimLog, SimSummary};
use juggle_core::FixedPoint;

use crate::error::{CliError, CliResult};
use crate::reports::{rows, SweepRow};

pub const STEPS_FILE: &str = "steps.csv";
pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const SUMMARY_FILE: &str = "summary.json";

/// Round-trip exact decimal form of an `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// One row of `steps.csv`: the true state before strike `k`, the strike
/// actually delivered and the flight that followed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRow {
    pub k: usize,
    pub t: f64,
    pub alpha: f64,
    pub h_x: f64,
    pub h_y: f64,
    pub h_z: f64,
    pub v_x: f64,
    pub v_y: f64,
    pub v_z: f64,
    pub alpha_dot: f64,
    pub beta_dot: f64,
    pub impulse: f64,
    pub offset: f64,
    pub phi: f64,
    pub delta_alpha: f64,
    pub delta: f64,
    pub impulse_saturated: bool,
    pub offset_saturated: bool,
}

/// One row of `trajectory.csv` (inertial frame).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub k: usize,
    pub t: f64,
    pub h_x: f64,
    pub h_y: f64,
    pub h_z: f64,
    pub alpha: f64,
    pub beta: f64,
}

const STEP_HEADER: [&str; 18] = [
    "k",
    "t",
    "alpha",
    "h_x",
    "h_y",
    "h_z",
    "v_x",
    "v_y",
    "v_z",
    "alpha_dot",
    "beta_dot",
    "impulse",
    "offset",
    "phi",
    "delta_alpha",
    "delta",
    "impulse_saturated",
    "offset_saturated",
];

const TRAJECTORY_HEADER: [&str; 7] = ["k", "t", "h_x", "h_y", "h_z", "alpha", "beta"];

pub fn step_rows(log: &SimLog) -> Vec<StepRow> {
    log.steps
        .iter()
        .map(|s| StepRow {
            k: s.k,
            t: s.time,
            alpha: s.alpha,
            h_x: s.state.h.x,
            h_y: s.state.h.y,
            h_z: s.state.h.z,
            v_x: s.state.v.x,
            v_y: s.state.v.y,
            v_z: s.state.v.z,
            alpha_dot: s.state.alpha_dot,
            beta_dot: s.state.beta_dot,
            impulse: s.applied.impulse,
            offset: s.applied.offset,
            phi: s.applied.phi,
            delta_alpha: s.record.delta_alpha,
            delta: s.record.flight.delta,
            impulse_saturated: s.actuation.impulse_saturated,
            offset_saturated: s.actuation.offset_saturated,
        })
        .collect()
}

pub fn trajectory_rows(log: &SimLog) -> Vec<TrajectoryRow> {
    log.steps
        .iter()
        .flat_map(|s| {
            s.samples.iter().map(move |p| TrajectoryRow {
                k: s.k,
                t: p.t,
                h_x: p.h.x,
                h_y: p.h.y,
                h_z: p.h.z,
                alpha: p.alpha,
                beta: p.beta,
            })
        })
        .collect()
}

pub fn write_steps<W: Write>(rows: &[StepRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(STEP_HEADER)?;
    for r in rows {
        let mut rec = vec![r.k.to_string()];
        rec.extend(
            [
                r.t,
                r.alpha,
                r.h_x,
                r.h_y,
                r.h_z,
                r.v_x,
                r.v_y,
                r.v_z,
                r.alpha_dot,
                r.beta_dot,
                r.impulse,
                r.offset,
                r.phi,
                r.delta_alpha,
                r.delta,
            ]
            .map(fmt_f64),
        );
        rec.push(r.impulse_saturated.to_string());
        rec.push(r.offset_saturated.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trajectory<W: Write>(rows: &[TrajectoryRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRAJECTORY_HEADER)?;
    for r in rows {
        let mut rec = vec![r.k.to_string()];
        rec.extend([r.t, r.h_x, r.h_y, r.h_z, r.alpha, r.beta].map(fmt_f64));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn read_rows<T: for<'de> Deserialize<'de>, R: Read>(input: R) -> csv::Result<Vec<T>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

pub fn read_steps<R: Read>(input: R) -> csv::Result<Vec<StepRow>> {
    read_rows(input)
}

pub fn read_trajectory<R: Read>(input: R) -> csv::Result<Vec<TrajectoryRow>> {
    read_rows(input)
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub config: SimConfig,
    pub seed: Option<u64>,
    pub fixed_point: FixedPoint,
    /// `u = K e`, 3 × 8.
    pub gain: Vec<Vec<f64>>,
    pub iterations: usize,
    pub metrics: SimSummary,
}

pub fn run_summary(log: &SimLog) -> RunSummary {
    RunSummary {
        config: log.config,
        seed: log.config.seed,
        fixed_point: log.fixed_point,
        gain: rows(&log.gain.k),
        iterations: log.gain.iterations,
        metrics: log.summary.clone(),
    }
}

/// Paths written by [`export_run`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Artifacts {
    pub steps: PathBuf,
    pub trajectory: PathBuf,
    pub summary: PathBuf,
}

fn create(path: &Path) -> CliResult<fs::File> {
    fs::File::create(path).map_err(|e| CliError::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::format(path, format!("{other:?}")),
    }
}

/// Writes the three artifacts into `dir`, creating it if needed.
pub fn export_run(log: &SimLog, dir: &Path) -> CliResult<Artifacts> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let paths = Artifacts {
        steps: dir.join(STEPS_FILE),
        trajectory: dir.join(TRAJECTORY_FILE),
        summary: dir.join(SUMMARY_FILE),
    };
    write_steps(&step_rows(log), create(&paths.steps)?).map_err(|e| csv_error(&paths.steps, e))?;
    write_trajectory(&trajectory_rows(log), create(&paths.trajectory)?)
        .map_err(|e| csv_error(&paths.trajectory, e))?;
    let mut f = create(&paths.summary)?;
    serde_json::to_writer_pretty(&mut f, &run_summary(log))
        .map_err(|e| CliError::format(&paths.summary, e))?;
    writeln!(f).map_err(|e| CliError::io(&paths.summary, e))?;
    Ok(paths)
}

pub fn load_steps(path: &Path) -> CliResult<Vec<StepRow>> {
    let f = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    read_steps(f).map_err(|e| csv_error(path, e))
}

pub fn load_trajectory(path: &Path) -> CliResult<Vec<TrajectoryRow>> {
    let f = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    read_trajectory(f).map_err(|e| csv_error(path, e))
}

pub fn load_summary(path: &Path) -> CliResult<RunSummary> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::format(path, e))
}

/// Writes `sweep.csv` into `dir`; missing values are left empty.
pub fn export_sweep(rows: &[SweepRow], dir: &Path) -> CliResult<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join("sweep.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::format(&path, e))?;
    w.write_record([
        "beta_star",
        "delta_star",
        "delta_alpha_star",
        "feasible",
        "delta_min",
        "controllability_rank",
        "spectral_radius",
        "error",
    ])
    .map_err(|e| CliError::format(&path, e))?;
    let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
    for r in rows {
        w.write_record([
            fmt_f64(r.beta_star),
            fmt_f64(r.delta_star),
            fmt_f64(r.delta_alpha_star),
            r.feasible.to_string(),
            opt(r.delta_min),
            r.controllability_rank
                .map(|n| n.to_string())
                .unwrap_or_default(),
            opt(r.spectral_radius),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(|e| CliError::format(&path, e))?;
    }
    w.flush().map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}
