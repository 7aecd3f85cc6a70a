use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use juggle::config::{load_config, Overrides};
use juggle::error::{CliError, CliResult};
use juggle::export::export_run;
use juggle::reports::{
    fixed_point_report, gains_report, linearize_report, precess_report, simulate, sweep, SweepGrid,
};
use juggle::OUT_DIR_ENV;
use juggle_core::sim::SimConfig;

/// Simulate and stabilize a stick juggled in 3-D by impulsive strikes.
#[derive(Parser)]
#[command(name = "juggle", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON run configuration; missing fields take the built-in defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Strike tilt β* (rad).
    #[arg(long)]
    beta: Option<f64>,
    /// Steady flight time δ* (s).
    #[arg(long)]
    delta: Option<f64>,
    /// Flight time as a multiple of the shortest feasible one.
    #[arg(long)]
    p: Option<f64>,
    /// Precession per strike Δα* (rad).
    #[arg(long)]
    dalpha: Option<f64>,
    /// Height of the centre of mass at the strike (m).
    #[arg(long)]
    h_bar_z: Option<f64>,
}

impl Common {
    fn resolve(&self, extra: Overrides) -> CliResult<SimConfig> {
        let mut cfg = match &self.config {
            Some(path) => load_config(path)?,
            None => SimConfig::default(),
        };
        Overrides {
            beta_star: self.beta,
            delta_star: self.delta,
            delta_alpha_star: self.dalpha,
            p: self.p,
            h_bar_z_star: self.h_bar_z,
            ..extra
        }
        .apply(&mut cfg);
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form steady juggling state and strike.
    FixedPoint(Common),
    /// Finite-difference Jacobians of the return map at the fixed point.
    Linearize(Common),
    /// Discrete LQR gain for the linearized map.
    Gains(Common),
    /// Closed-loop run; writes steps.csv, trajectory.csv and summary.json.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        steps: Option<usize>,
        /// Enable measurement noise and impulse loss (default magnitudes).
        #[arg(long)]
        noise: bool,
        /// Dense samples per flight in trajectory.csv.
        #[arg(long)]
        render: Option<usize>,
        #[arg(long, env = OUT_DIR_ENV, default_value = "juggle-out")]
        out_dir: PathBuf,
    },
    /// Feasibility and closed-loop spectral radius over a design grid.
    Sweep {
        #[arg(long, global = true)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', required = true)]
        betas: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        deltas: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        dalphas: Vec<f64>,
        /// Also write sweep.csv here.
        #[arg(long, env = OUT_DIR_ENV)]
        out_dir: Option<PathBuf>,
    },
    /// Steady precession on a hoop, the limit of vanishing precession steps.
    Precess {
        #[arg(long, global = true)]
        config: Option<PathBuf>,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// Compare with the fixed point at this precession step (rad).
        #[arg(long)]
        compare: Option<f64>,
    },
}

fn print_json<T: Serialize>(value: &T) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| CliError::format("<stdout>", e))?;
    writeln!(out).map_err(|e| CliError::io("<stdout>", e))
}

fn base_config(path: &Option<PathBuf>) -> CliResult<SimConfig> {
    match path {
        Some(p) => load_config(p),
        None => Ok(SimConfig::default()),
    }
}

#[derive(Serialize)]
struct SimulateOutput<'a> {
    artifacts: juggle::Artifacts,
    summary: &'a juggle_core::sim::SimSummary,
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::FixedPoint(c) => {
            print_json(&fixed_point_report(&c.resolve(Overrides::default())?)?)
        }
        Command::Linearize(c) => print_json(&linearize_report(&c.resolve(Overrides::default())?)?),
        Command::Gains(c) => print_json(&gains_report(&c.resolve(Overrides::default())?)?),
        Command::Simulate {
            common,
            seed,
            steps,
            noise,
            render,
            out_dir,
        } => {
            let cfg = common.resolve(Overrides {
                seed,
                n_steps: steps,
                noise,
                render_samples_per_flight: render,
                ..Overrides::default()
            })?;
            let log = simulate(&cfg)?;
            let artifacts = export_run(&log, &out_dir)?;
            print_json(&SimulateOutput {
                artifacts,
                summary: &log.summary,
            })
        }
        Command::Sweep {
            config,
            betas,
            deltas,
            dalphas,
            out_dir,
        } => {
            let base = base_config(&config)?;
            let grid = SweepGrid {
                beta_star: betas,
                delta_star: deltas,
                delta_alpha_star: dalphas,
            };
            let rows = sweep(&base, &grid);
            if let Some(dir) = out_dir {
                juggle::export::export_sweep(&rows, &dir)?;
            }
            print_json(&rows)
        }
        Command::Precess {
            config,
            beta,
            p,
            compare,
        } => {
            let base = base_config(&config)?;
            print_json(&precess_report(beta, p, compare, &base.params)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Io { source, .. }) if source.kind() == std::io::ErrorKind::BrokenPipe => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("juggle: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
