//! Closed-loop juggling runs in the juggler frame.
//!
//! Each step measures the state on the section (optionally with
//! multiplicative noise), computes the ICPM feedback, optionally loses part
//! of the commanded impulse, and advances the true state through the return
//! map. The plant always evolves with the true state and the applied strike.

use alloc::vec::Vec;
use core::fmt;

use nalgebra::SVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flight::{render_flight, FlightSample, FreeFlight};
use crate::icpm::{feedback, linearize, Actuation, GainMatrix, DEFAULT_STEP_SCALE};
use crate::impulse::ControlInput;
#[allow(unused_imports)]
use crate::math::Float;
use crate::params::StickParams;
use crate::poincare::{Section, SectionStateInertial, SectionStateJuggler, StepRecord, STATE_DIM};
use crate::rotations::rot_z;
use crate::steady::{solve_fixed_point, FixedPoint, JuggleSpec, DEFAULT_H_BAR_Z};
use crate::Vec3;

/// Bounds of the uniform perturbations, as fractions of the nominal value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseSpec {
    /// Impulse actually delivered is `I (1 - u)`, `u ~ U(0, max)`.
    pub impulse_loss_max: f64,
    /// Measured positions are `h (1 + u)`, `u ~ U(-max, max)`.
    pub position_noise_max: f64,
    /// Same for linear velocities and Euler rates.
    pub velocity_noise_max: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            impulse_loss_max: 0.025,
            position_noise_max: 0.01,
            velocity_noise_max: 0.025,
        }
    }
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = [
            self.impulse_loss_max,
            self.position_noise_max,
            self.velocity_noise_max,
        ]
        .iter()
        .all(|x| (0.0..1.0).contains(x));
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig("noise fractions must lie in [0, 1)"))
        }
    }
}

/// Multiplicative perturbation `x (1 + u)`, `u ~ U(-max, max)`.
/// `max = 0` returns `x` without drawing from `rng`.
pub fn perturb<R: Rng + ?Sized>(x: f64, max_fraction: f64, rng: &mut R) -> f64 {
    if max_fraction == 0.0 {
        return x;
    }
    x * (1.0 + rng.random_range(-max_fraction..=max_fraction))
}

pub fn perturb_vec3<R: Rng + ?Sized>(v: &Vec3, max_fraction: f64, rng: &mut R) -> Vec3 {
    Vec3::new(
        perturb(v.x, max_fraction, rng),
        perturb(v.y, max_fraction, rng),
        perturb(v.z, max_fraction, rng),
    )
}

/// One-sided loss `I (1 - u)`, `u ~ U(0, max)`; never increases `I`.
pub fn impulse_loss<R: Rng + ?Sized>(impulse: f64, max_fraction: f64, rng: &mut R) -> f64 {
    if max_fraction == 0.0 {
        return impulse;
    }
    impulse * (1.0 - rng.random_range(0.0..=max_fraction))
}

/// State measurement with position and velocity noise.
pub fn measure<R: Rng + ?Sized>(
    y: &SectionStateJuggler,
    noise: &NoiseSpec,
    rng: &mut R,
) -> SectionStateJuggler {
    let h = perturb_vec3(&y.h, noise.position_noise_max, rng);
    let v = perturb_vec3(&y.v, noise.velocity_noise_max, rng);
    let alpha_dot = perturb(y.alpha_dot, noise.velocity_noise_max, rng);
    let beta_dot = perturb(y.beta_dot, noise.velocity_noise_max, rng);
    SectionStateJuggler {
        h,
        v,
        alpha_dot,
        beta_dot,
    }
}

/// Diagonal LQR weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LqrWeights {
    pub q_diag: [f64; STATE_DIM],
    pub r_diag: [f64; 3],
}

impl Default for LqrWeights {
    fn default() -> Self {
        Self {
            q_diag: [1.0; STATE_DIM],
            r_diag: [2.0, 0.5, 1.0],
        }
    }
}

/// Everything needed to reproduce a run. Missing fields deserialize to the
/// [`Default`] run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub params: StickParams,
    pub spec: JuggleSpec,
    pub h_bar_z_star: f64,
    /// State just before the first strike (on the section).
    pub initial_state: SectionStateJuggler,
    pub n_steps: usize,
    #[serde(alias = "lqr_weights")]
    pub weights: LqrWeights,
    pub noise: Option<NoiseSpec>,
    #[serde(alias = "rng_seed")]
    pub seed: Option<u64>,
    /// Dense samples per flight; `0` disables rendering.
    pub render_samples_per_flight: usize,
    pub fd_step_scale: f64,
}

impl Default for SimConfig {
    /// The 100 g stick juggled at `β* = π/3`, `δ* = 0.6 s`, `Δα* = 2π/3`,
    /// starting off the steady orbit.
    fn default() -> Self {
        use core::f64::consts::PI;
        Self {
            params: StickParams::default(),
            spec: JuggleSpec::with_flight_time(PI / 3.0, 0.6, 2.0 * PI / 3.0),
            h_bar_z_star: DEFAULT_H_BAR_Z,
            initial_state: SectionStateJuggler {
                h: Vec3::new(0.9, -0.2, 1.2),
                v: Vec3::new(1.3, 0.2, -1.7),
                alpha_dot: 2.2,
                beta_dot: 2.1,
            },
            n_steps: 20,
            weights: LqrWeights::default(),
            noise: None,
            seed: None,
            render_samples_per_flight: 0,
            fd_step_scale: DEFAULT_STEP_SCALE,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.n_steps == 0 {
            return Err(Error::InvalidConfig("n_steps must be at least 1"));
        }
        if let Some(noise) = &self.noise {
            noise.validate()?;
            if self.seed.is_none() {
                return Err(Error::InvalidConfig(
                    "a seed is required when noise is enabled",
                ));
            }
        }
        if self.render_samples_per_flight == 1 {
            return Err(Error::InvalidConfig(
                "render needs 0 or at least 2 samples per flight",
            ));
        }
        if !self.h_bar_z_star.is_finite() {
            return Err(Error::InvalidConfig("h_bar_z_star must be finite"));
        }
        Ok(())
    }
}

/// One logged strike.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimStep {
    /// Strike index, starting at 1.
    pub k: usize,
    /// Time of the strike since the first one (s).
    pub time: f64,
    /// Inertial precession angle `α_k` at the strike.
    pub alpha: f64,
    /// True state before the strike.
    pub state: SectionStateJuggler,
    /// State seen by the controller.
    pub measured: SectionStateJuggler,
    pub actuation: Actuation,
    /// Strike delivered to the stick (after impulse loss).
    pub applied: ControlInput,
    pub record: StepRecord<SectionStateJuggler>,
    /// Inertial-frame flight samples (empty unless rendering is enabled).
    pub samples: Vec<FlightSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSummary {
    pub n_steps: usize,
    /// `Ȳ(1) - Ȳ*`.
    pub initial_error: [f64; STATE_DIM],
    /// `Ȳ(n+1) - Ȳ*`.
    pub final_error: [f64; STATE_DIM],
    /// Largest Euclidean norm of `e(k)` over the run.
    pub max_error_norm: f64,
    /// Largest `|e_i(k)|` per component over the run.
    pub max_abs_error: [f64; STATE_DIM],
    /// First `k` from which every component stays within 1% of its initial
    /// magnitude until the end of the run.
    pub convergence_step: Option<usize>,
    pub impulse_saturations: usize,
    pub offset_saturations: usize,
    pub closed_loop_spectral_radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimLog {
    pub config: SimConfig,
    pub fixed_point: FixedPoint,
    pub gain: GainMatrix,
    pub steps: Vec<SimStep>,
    /// True state before strike `n_steps + 1`.
    pub final_state: SectionStateJuggler,
    pub summary: SimSummary,
}

impl SimLog {
    /// Errors `e(k)` for `k = 1 ..= n_steps + 1`.
    pub fn errors(&self) -> Vec<SVector<f64, STATE_DIM>> {
        let y_star = self.fixed_point.y_star.to_vector();
        self.steps
            .iter()
            .map(|s| s.state.to_vector() - y_star)
            .chain(core::iter::once(self.final_state.to_vector() - y_star))
            .collect()
    }
}

/// A run failed; `step` is `None` for setup failures.
#[derive(Debug, Clone, PartialEq)]
pub struct SimError {
    pub step: Option<usize>,
    pub source: Error,
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.step {
            Some(k) => write!(f, "step {k}: {}", self.source),
            None => write!(f, "setup: {}", self.source),
        }
    }
}

impl core::error::Error for SimError {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        Some(&self.source)
    }
}

impl From<Error> for SimError {
    fn from(source: Error) -> Self {
        Self { step: None, source }
    }
}

/// Relative threshold defining convergence in [`SimSummary`].
pub const CONVERGENCE_FRACTION: f64 = 0.01;

fn summarize(errors: &[SVector<f64, STATE_DIM>], steps: &[SimStep], rho: f64) -> SimSummary {
    let e1 = errors[0];
    let thresholds: [f64; STATE_DIM] =
        core::array::from_fn(|i| (CONVERGENCE_FRACTION * e1[i].abs()).max(1e-9));
    let within = |e: &SVector<f64, STATE_DIM>| (0..STATE_DIM).all(|i| e[i].abs() <= thresholds[i]);
    let mut convergence_step = None;
    for (idx, e) in errors.iter().enumerate().rev() {
        if within(e) {
            convergence_step = Some(idx + 1);
        } else {
            break;
        }
    }
    let mut max_abs_error = [0.0; STATE_DIM];
    for e in errors {
        for (m, x) in max_abs_error.iter_mut().zip(e.iter()) {
            *m = m.max(x.abs());
        }
    }
    let last = errors[errors.len() - 1];
    SimSummary {
        n_steps: steps.len(),
        initial_error: core::array::from_fn(|i| e1[i]),
        final_error: core::array::from_fn(|i| last[i]),
        max_error_norm: errors.iter().map(|e| e.norm()).fold(0.0, f64::max),
        max_abs_error,
        convergence_step,
        impulse_saturations: steps
            .iter()
            .filter(|s| s.actuation.impulse_saturated)
            .count(),
        offset_saturations: steps
            .iter()
            .filter(|s| s.actuation.offset_saturated)
            .count(),
        closed_loop_spectral_radius: rho,
    }
}

/// Fixed point and LQR gain for a config.
pub fn design(cfg: &SimConfig) -> Result<(FixedPoint, GainMatrix)> {
    let fp = solve_fixed_point(&cfg.spec, &cfg.params, Some(cfg.h_bar_z_star))?;
    let lin = linearize(&fp, &cfg.params, cfg.fd_step_scale)?;
    let gain = lin.lqr(&cfg.weights.q_diag, &cfg.weights.r_diag)?;
    Ok((fp, gain))
}

fn to_inertial_sample(s: &FlightSample, alpha_k: f64, t_k: f64) -> FlightSample {
    let r = rot_z(alpha_k);
    FlightSample {
        t: s.t + t_k,
        h: r * s.h,
        v: r * s.v,
        alpha: s.alpha + alpha_k,
        ..*s
    }
}

pub fn run_closed_loop(cfg: &SimConfig) -> core::result::Result<SimLog, SimError> {
    cfg.validate()?;
    let (fp, gain) = design(cfg)?;
    let section = Section::new(fp.beta_star, cfg.params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or(0));

    let mut steps = Vec::with_capacity(cfg.n_steps);
    let mut state = cfg.initial_state;
    let mut alpha = 0.0;
    let mut time = 0.0;
    for k in 1..=cfg.n_steps {
        let at_step = |source| SimError {
            step: Some(k),
            source,
        };
        let measured = match &cfg.noise {
            Some(noise) => measure(&state, noise, &mut rng),
            None => state,
        };
        let actuation = feedback(&measured, &fp, &gain, &cfg.params);
        let applied = match &cfg.noise {
            Some(noise) => ControlInput {
                impulse: impulse_loss(actuation.input.impulse, noise.impulse_loss_max, &mut rng),
                ..actuation.input
            },
            None => actuation.input,
        };
        let (next, record) = section.map_juggler(&state, &applied).map_err(at_step)?;

        let samples = if cfg.render_samples_per_flight >= 2 {
            let post = SectionStateInertial {
                h: state.h,
                v: record.post_impulse.v,
                alpha: 0.0,
                alpha_dot: record.post_impulse.alpha_dot,
                beta_dot: record.post_impulse.beta_dot,
            };
            render_flight(
                &post,
                &record.flight,
                fp.beta_star,
                &cfg.params,
                cfg.render_samples_per_flight,
            )
            .map_err(at_step)?
            .iter()
            .map(|s| to_inertial_sample(s, alpha, time))
            .collect()
        } else {
            Vec::new()
        };

        steps.push(SimStep {
            k,
            time,
            alpha,
            state,
            measured,
            actuation,
            applied,
            record,
            samples,
        });
        alpha += record.delta_alpha;
        time += record.flight.delta;
        state = next;
    }

    let mut log = SimLog {
        config: *cfg,
        fixed_point: fp,
        gain,
        steps,
        final_state: state,
        summary: SimSummary {
            n_steps: 0,
            initial_error: [0.0; STATE_DIM],
            final_error: [0.0; STATE_DIM],
            max_error_norm: 0.0,
            max_abs_error: [0.0; STATE_DIM],
            convergence_step: None,
            impulse_saturations: 0,
            offset_saturations: 0,
            closed_loop_spectral_radius: 0.0,
        },
    };
    log.summary = summarize(
        &log.errors(),
        &log.steps,
        log.gain.closed_loop_spectral_radius,
    );
    Ok(log)
}

/// Full free-flight state off the section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeState {
    pub h: Vec3,
    pub v: Vec3,
    pub alpha: f64,
    pub beta: f64,
    pub alpha_dot: f64,
    pub beta_dot: f64,
}

/// Section state at the first ascending crossing and the time it took.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionArrival {
    pub state: SectionStateInertial,
    pub time: f64,
}

/// Bisection stops once the bracket is this short (s).
pub const CROSSING_TIME_TOLERANCE: f64 = 1e-10;
/// Samples per axis rotation when scanning for a crossing.
const SCAN_PER_TURN: f64 = 512.0;

/// Flies the stick freely until `β` rises through `β*`.
pub fn settle_to_section(
    free: &FreeState,
    params: &StickParams,
    beta_star: f64,
    horizon: f64,
) -> Result<SectionArrival> {
    params.validate()?;
    crate::impulse::check_section(beta_star)?;
    let flight = FreeFlight::new(
        free.h,
        free.v,
        free.alpha,
        free.beta,
        free.alpha_dot,
        free.beta_dot,
        params,
    );
    let arrival = |t: f64| {
        let s = flight.at(t);
        SectionArrival {
            state: SectionStateInertial {
                h: s.h,
                v: s.v,
                alpha: s.alpha,
                alpha_dot: s.alpha_dot,
                beta_dot: s.beta_dot,
            },
            time: t,
        }
    };
    let f = |t: f64| flight.at(t).beta - beta_star;

    if free.beta == beta_star && free.beta_dot > 0.0 {
        return Ok(SectionArrival {
            state: SectionStateInertial {
                h: free.h,
                v: free.v,
                alpha: free.alpha,
                alpha_dot: free.alpha_dot,
                beta_dot: free.beta_dot,
            },
            time: 0.0,
        });
    }
    let no_crossing = Error::NoSectionCrossing { horizon };
    let period = flight.rotation_period().ok_or(no_crossing.clone())?;
    if !(horizon > 0.0) {
        return Err(no_crossing);
    }
    let n = ((horizon / period) * SCAN_PER_TURN).ceil().clamp(16.0, 1e7) as usize;
    let dt = horizon / n as f64;
    let mut t0 = 0.0;
    let mut f0 = f(0.0);
    for i in 1..=n {
        let t1 = dt * i as f64;
        let f1 = f(t1);
        if f0 < 0.0 && f1 >= 0.0 {
            let (mut lo, mut hi) = (t0, t1);
            while hi - lo > CROSSING_TIME_TOLERANCE {
                let mid = 0.5 * (lo + hi);
                if f(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(arrival(0.5 * (lo + hi)));
        }
        t0 = t1;
        f0 = f1;
    }
    Err(no_crossing)
}
