//! Serializable results of the analysis subcommands.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use juggle_core::icpm::{linearize, LinearizedMap};
use juggle_core::sim::{SimConfig, SimLog};
use juggle_core::steady::{compare_with_limit, precession_limit, solve_fixed_point, HoopResiduals};
use juggle_core::{FixedPoint, JuggleSpec, PrecessionState, StickParams};

use crate::error::CliResult;

/// Row-major copy of a matrix for JSON output.
pub fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub params: StickParams,
    pub fixed_point: FixedPoint,
    /// `‖P̄(Ȳ*, U*) - Ȳ*‖∞`.
    pub residual: f64,
}

pub fn fixed_point_report(cfg: &SimConfig) -> CliResult<FixedPointReport> {
    let fixed_point = solve_fixed_point(&cfg.spec, &cfg.params, Some(cfg.h_bar_z_star))?;
    let residual = fixed_point.residual(&cfg.params)?;
    Ok(FixedPointReport {
        params: cfg.params,
        fixed_point,
        residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearizeReport {
    pub fixed_point: FixedPoint,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub state_steps: Vec<f64>,
    pub input_steps: Vec<f64>,
    pub controllability_rank: usize,
    /// Largest deviation of the rate rows from their exact values.
    pub rate_row_error: f64,
}

fn linearized(cfg: &SimConfig) -> CliResult<LinearizedMap> {
    let fp = solve_fixed_point(&cfg.spec, &cfg.params, Some(cfg.h_bar_z_star))?;
    Ok(linearize(&fp, &cfg.params, cfg.fd_step_scale)?)
}

pub fn linearize_report(cfg: &SimConfig) -> CliResult<LinearizeReport> {
    let lin = linearized(cfg)?;
    Ok(LinearizeReport {
        fixed_point: lin.fixed_point,
        a: rows(&lin.a_dynamic()),
        b: rows(&lin.b_dynamic()),
        state_steps: lin.state_steps.iter().copied().collect(),
        input_steps: lin.input_steps.iter().copied().collect(),
        controllability_rank: lin.controllability_rank(),
        rate_row_error: lin.rate_row_error(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainsReport {
    pub q_diag: Vec<f64>,
    pub r_diag: Vec<f64>,
    /// `u = K e`, 3 × 8.
    pub k: Vec<Vec<f64>>,
    pub riccati: Vec<Vec<f64>>,
    pub closed_loop_spectral_radius: f64,
    pub iterations: usize,
    pub controllability_rank: usize,
}

pub fn gains_report(cfg: &SimConfig) -> CliResult<GainsReport> {
    let lin = linearized(cfg)?;
    let gain = lin.lqr(&cfg.weights.q_diag, &cfg.weights.r_diag)?;
    Ok(GainsReport {
        q_diag: cfg.weights.q_diag.to_vec(),
        r_diag: cfg.weights.r_diag.to_vec(),
        k: rows(&gain.k),
        riccati: rows(&gain.p),
        closed_loop_spectral_radius: gain.closed_loop_spectral_radius,
        iterations: gain.iterations,
        controllability_rank: lin.controllability_rank(),
    })
}

pub fn simulate(cfg: &SimConfig) -> CliResult<SimLog> {
    Ok(juggle_core::sim::run_closed_loop(cfg)?)
}

/// One design point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub beta_star: f64,
    pub delta_star: f64,
    pub delta_alpha_star: f64,
    pub feasible: bool,
    pub delta_min: Option<f64>,
    pub controllability_rank: Option<usize>,
    pub spectral_radius: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub beta_star: Vec<f64>,
    pub delta_star: Vec<f64>,
    pub delta_alpha_star: Vec<f64>,
}

fn sweep_point(base: &SimConfig, beta: f64, delta: f64, dalpha: f64) -> SweepRow {
    let mut row = SweepRow {
        beta_star: beta,
        delta_star: delta,
        delta_alpha_star: dalpha,
        feasible: false,
        delta_min: None,
        controllability_rank: None,
        spectral_radius: None,
        error: None,
    };
    let cfg = SimConfig {
        spec: JuggleSpec::with_flight_time(beta, delta, dalpha),
        ..*base
    };
    let fp = match solve_fixed_point(&cfg.spec, &cfg.params, Some(cfg.h_bar_z_star)) {
        Ok(fp) => fp,
        Err(e) => {
            row.delta_min = juggle_core::steady::min_flight_time(beta, dalpha, &cfg.params).ok();
            row.error = Some(e.to_string());
            return row;
        }
    };
    row.feasible = true;
    row.delta_min = Some(fp.delta_min);
    let lin = match linearize(&fp, &cfg.params, cfg.fd_step_scale) {
        Ok(l) => l,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    row.controllability_rank = Some(lin.controllability_rank());
    match lin.lqr(&cfg.weights.q_diag, &cfg.weights.r_diag) {
        Ok(g) => row.spectral_radius = Some(g.closed_loop_spectral_radius),
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Evaluates every grid point in parallel; rows come back in grid order.
pub fn sweep(base: &SimConfig, grid: &SweepGrid) -> Vec<SweepRow> {
    let points: Vec<(f64, f64, f64)> = grid
        .beta_star
        .iter()
        .flat_map(|&b| {
            grid.delta_star
                .iter()
                .flat_map(move |&d| grid.delta_alpha_star.iter().map(move |&a| (b, d, a)))
        })
        .collect();
    points
        .par_iter()
        .map(|&(b, d, a)| sweep_point(base, b, d, a))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitCheck {
    pub delta_alpha_star: f64,
    pub flight_time: f64,
    /// `I*/δ*`, the force the strikes average to.
    pub mean_force: f64,
    /// Relative gaps of `h̄x, v̄y, α̇, F, r` to the limit.
    pub relative: [f64; 5],
    /// `v̄x, v̄z, β̇`, which vanish in the limit.
    pub vanishing: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecessReport {
    pub limit: PrecessionState,
    pub period: f64,
    pub residuals: HoopResiduals,
    pub max_residual: f64,
    pub check: Option<LimitCheck>,
}

/// Steady precession on a hoop, optionally compared with the fixed point at
/// a small precession step.
pub fn precess_report(
    beta_star: f64,
    p_free: f64,
    compare_at: Option<f64>,
    params: &StickParams,
) -> CliResult<PrecessReport> {
    let limit = precession_limit(beta_star, p_free, params)?;
    let residuals = limit.hoop_residuals(params);
    let check = match compare_at {
        Some(da) => {
            let c = compare_with_limit(beta_star, p_free, da, params)?;
            Some(LimitCheck {
                delta_alpha_star: da,
                flight_time: c.fixed_point.delta_star,
                mean_force: c.mean_force,
                relative: c.relative,
                vanishing: c.vanishing,
            })
        }
        None => None,
    };
    Ok(PrecessReport {
        limit,
        period: limit.period(),
        residuals,
        max_residual: residuals.max(),
        check,
    })
}
