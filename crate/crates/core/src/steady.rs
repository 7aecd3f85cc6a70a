//! Steady juggling: closed-form fixed points of the juggler-frame map.
//!
//! A steady motion is chosen by the strike tilt `β*`, the flight time `δ*`
//! and the precession per strike `Δα*`. Everything else follows in closed
//! form except `h̄z*`, which drops out of the fixed-point equations and is a
//! free choice. Two special cases are exposed: `Δα* = π` (planar juggling)
//! and the limit `Δα* → 0⁺`, where the strikes merge into a steady hoop
//! reaction and the stick precesses steadily.

use core::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::impulse::ControlInput;
#[allow(unused_imports)]
use crate::math::Float;
use crate::params::StickParams;
use crate::poincare::{Section, SectionStateJuggler};
use crate::Vec3;

/// Default free height of the center of mass on the section (m).
pub const DEFAULT_H_BAR_Z: f64 = 1.6;

/// Tolerance for `δ*` and `p·δ_min` to be considered the same choice.
pub const FLIGHT_TIME_AGREEMENT: f64 = 1e-9;

/// Design targets of a steady juggling motion.
///
/// The flight time is given either directly (`delta_star`) or as a multiple
/// `p ≥ 1` of the shortest feasible flight time. If both are set they must
/// agree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JuggleSpec {
    /// Strike tilt `β*` in `(0, π/2)`.
    pub beta_star: f64,
    /// Precession per strike `Δα*` in `(0, π]`.
    pub delta_alpha_star: f64,
    /// Flight time `δ*` (s).
    #[serde(default)]
    pub delta_star: Option<f64>,
    /// Flight-time multiplier `p ≥ 1`.
    #[serde(default)]
    pub p: Option<f64>,
}

impl JuggleSpec {
    pub fn with_flight_time(beta_star: f64, delta_star: f64, delta_alpha_star: f64) -> Self {
        Self {
            beta_star,
            delta_alpha_star,
            delta_star: Some(delta_star),
            p: None,
        }
    }

    pub fn with_multiplier(beta_star: f64, p: f64, delta_alpha_star: f64) -> Self {
        Self {
            beta_star,
            delta_alpha_star,
            delta_star: None,
            p: Some(p),
        }
    }

    fn validate_angles(&self) -> Result<()> {
        validate_angles(self.beta_star, self.delta_alpha_star)
    }

    /// Resolves the flight time against the minimum feasible one.
    pub fn flight_time(&self, params: &StickParams) -> Result<f64> {
        self.validate_angles()?;
        let delta_min = min_flight_time(self.beta_star, self.delta_alpha_star, params)?;
        match (self.delta_star, self.p) {
            (None, None) => Err(Error::InvalidSpec("either delta_star or p must be given")),
            (Some(d), None) => {
                if !(d.is_finite() && d > 0.0) {
                    return Err(Error::InvalidSpec("delta_star must be positive"));
                }
                Ok(d)
            }
            (None, Some(p)) => {
                if !p.is_finite() {
                    return Err(Error::InvalidSpec("p must be finite"));
                }
                Ok(p * delta_min)
            }
            (Some(d), Some(p)) => {
                if (d - p * delta_min).abs() > FLIGHT_TIME_AGREEMENT * d.abs().max(1.0) {
                    return Err(Error::InvalidSpec("delta_star and p * delta_min disagree"));
                }
                Ok(d)
            }
        }
    }
}

fn validate_angles(beta_star: f64, delta_alpha_star: f64) -> Result<()> {
    if !(beta_star > 0.0 && beta_star < FRAC_PI_2) {
        return Err(Error::InvalidSpec("beta_star must lie in (0, pi/2)"));
    }
    if !(delta_alpha_star > 0.0 && delta_alpha_star <= PI) {
        return Err(Error::InvalidSpec("delta_alpha_star must lie in (0, pi]"));
    }
    Ok(())
}

/// `cot(Δα/2) = sin Δα / (1 - cos Δα)`, exactly zero at `Δα = π`.
fn half_angle_cot(delta_alpha: f64) -> f64 {
    if delta_alpha == PI {
        0.0
    } else {
        1.0 / (0.5 * delta_alpha).tan()
    }
}

/// The shape factors `(Ψ, ξ)` of the steady flight.
///
/// `ξ = sqrt(1 + sec²β* cot²(Δα*/2))` and
/// `Ψ = (2/ξ)(π - 2 atan(ξ cot β*)) = (4/ξ) atan(tan β* / ξ)`.
/// The second form has no cancellation as `Δα* → 0⁺` (`ξ → ∞`) and gives
/// `ξ = 1`, `Ψ = 4β*` at `Δα* = π` without special cases.
pub fn shape_factors(beta_star: f64, delta_alpha_star: f64) -> (f64, f64) {
    let q = half_angle_cot(delta_alpha_star);
    let (sb, cb) = beta_star.sin_cos();
    let xi = (1.0 + (q / cb) * (q / cb)).sqrt();
    let psi = 4.0 / xi * ((sb / cb) / xi).atan();
    (psi, xi)
}

/// Shortest flight time for which the strike point stays on the stick,
/// `δ_min = sqrt(2 J Ψ sin β* / (m g ℓ))`.
pub fn min_flight_time(beta_star: f64, delta_alpha_star: f64, p: &StickParams) -> Result<f64> {
    validate_angles(beta_star, delta_alpha_star)?;
    let (psi, _) = shape_factors(beta_star, delta_alpha_star);
    debug_assert!(psi >= 0.0);
    Ok((2.0 * p.inertia * psi * beta_star.sin() / (p.mass * p.gravity * p.length)).sqrt())
}

/// Steady juggling state and strike.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub beta_star: f64,
    pub delta_star: f64,
    pub delta_alpha_star: f64,
    pub y_star: SectionStateJuggler,
    pub u_star: ControlInput,
    pub psi: f64,
    pub xi: f64,
    pub delta_min: f64,
}

impl FixedPoint {
    /// Multiplier `p = δ*/δ_min`.
    pub fn p(&self) -> f64 {
        self.delta_star / self.delta_min
    }

    /// `‖P̄(Ȳ*, U*) - Ȳ*‖∞` for the given stick.
    pub fn residual(&self, params: &StickParams) -> Result<f64> {
        let section = Section::new(self.beta_star, *params)?;
        let (next, _) = section.map_juggler(&self.y_star, &self.u_star)?;
        Ok((next.to_vector() - self.y_star.to_vector()).amax())
    }
}

/// Closed-form fixed point; `h_bar_z` defaults to [`DEFAULT_H_BAR_Z`].
pub fn solve_fixed_point(
    spec: &JuggleSpec,
    params: &StickParams,
    h_bar_z: Option<f64>,
) -> Result<FixedPoint> {
    params.validate()?;
    let beta = spec.beta_star;
    let d_alpha = spec.delta_alpha_star;
    let delta = spec.flight_time(params)?;
    let delta_min = min_flight_time(beta, d_alpha, params)?;
    if delta < delta_min * (1.0 - 1e-12) {
        return Err(Error::InfeasibleFlightTime { delta, delta_min });
    }

    let (psi, xi) = shape_factors(beta, d_alpha);
    let q = half_angle_cot(d_alpha);
    let half_sin = (0.5 * d_alpha).sin();
    let (sb, cb) = beta.sin_cos();
    let cot_b = cb / sb;
    let StickParams {
        mass: m,
        inertia: j,
        gravity: g,
        ..
    } = *params;

    // 1 - cos Δα = 2 sin²(Δα/2) and sin Δα / (1 - cos Δα) = cot(Δα/2).
    let h_x = g * delta * delta * cot_b / (4.0 * half_sin * half_sin);
    let v_x = g * delta * cot_b / 2.0;
    let v_y = g * delta * cot_b * q / 2.0;
    let v_z = -0.5 * g * delta;
    let alpha_dot = psi * q / (delta * (2.0 * beta).sin());
    let beta_dot = psi / (2.0 * delta);
    let impulse = m * g * delta / sb;
    let offset = (j * psi * sb / (m * g * delta * delta)).min(params.half_length());

    Ok(FixedPoint {
        beta_star: beta,
        delta_star: delta,
        delta_alpha_star: d_alpha,
        y_star: SectionStateJuggler {
            h: Vec3::new(h_x, 0.0, h_bar_z.unwrap_or(DEFAULT_H_BAR_Z)),
            v: Vec3::new(v_x, v_y, v_z),
            alpha_dot,
            beta_dot,
        },
        u_star: ControlInput::new(impulse, offset, 0.0),
        psi,
        xi,
        delta_min,
    })
}

/// Steady precession of the stick on a frictionless hoop, the `Δα* → 0⁺`
/// limit of steady juggling. `v̄x = v̄z = β̇ = φ = h̄y = 0` in this state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecessionState {
    pub beta_star: f64,
    /// Free multiplier `p ≥ 1`; `r* = ℓ/(2p²)`.
    pub p_free: f64,
    /// Radius of the center-of-mass circle (m).
    pub h_bar_x: f64,
    /// Tangential speed of the center of mass (m/s).
    pub v_bar_y: f64,
    pub alpha_dot: f64,
    /// Hoop reaction normal to the stick (N).
    pub force: f64,
    /// Hoop contact offset from the center of mass (m).
    pub offset: f64,
}

pub fn precession_limit(
    beta_star: f64,
    p_free: f64,
    params: &StickParams,
) -> Result<PrecessionState> {
    params.validate()?;
    if !(beta_star > 0.0 && beta_star < FRAC_PI_2) {
        return Err(Error::InvalidSpec("beta_star must lie in (0, pi/2)"));
    }
    if !(p_free >= 1.0 && p_free.is_finite()) {
        return Err(Error::InvalidSpec("p must be at least 1"));
    }
    let StickParams {
        mass: m,
        length: l,
        inertia: j,
        gravity: g,
    } = *params;
    let (sb, cb) = beta_star.sin_cos();
    let p2 = p_free * p_free;
    Ok(PrecessionState {
        beta_star,
        p_free,
        h_bar_x: 2.0 * p2 * j * sb * cb * cb / (m * l),
        v_bar_y: p_free * (2.0 * j * g * cb * cb * cb / (m * l)).sqrt(),
        alpha_dot: (m * g * l / (2.0 * j * sb * sb * cb)).sqrt() / p_free,
        force: m * g / sb,
        offset: l / (2.0 * p2),
    })
}

/// Relative residuals of the continuous hoop-precession balance laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoopResiduals {
    /// Moment balance `F r = J α̇² sin β cos β`.
    pub moment: f64,
    /// Vertical force balance `F sin β = m g`.
    pub vertical: f64,
    /// Precession rate from the moment balance with `r = ℓ/(2p²)`.
    pub precession_rate: f64,
    /// Centripetal balance `F cos β / m = α̇² h̄x`.
    pub centripetal: f64,
    /// Radius closed form.
    pub radius: f64,
    /// Rolling relation `v̄y = α̇ h̄x`.
    pub tangential: f64,
    /// Tangential speed closed form.
    pub speed: f64,
}

impl HoopResiduals {
    pub fn max(&self) -> f64 {
        [
            self.moment,
            self.vertical,
            self.precession_rate,
            self.centripetal,
            self.radius,
            self.tangential,
            self.speed,
        ]
        .iter()
        .fold(0.0, |a, b| a.max(b.abs()))
    }
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

impl PrecessionState {
    /// Checks the state against the balance laws of a stick precessing on a
    /// hoop under constant normal force, derived independently of the limit.
    pub fn hoop_residuals(&self, params: &StickParams) -> HoopResiduals {
        let StickParams {
            mass: m,
            length: l,
            inertia: j,
            gravity: g,
        } = *params;
        let (sb, cb) = self.beta_star.sin_cos();
        let p = self.p_free;
        let w = self.alpha_dot;
        HoopResiduals {
            moment: rel(self.force * self.offset, j * w * w * sb * cb),
            vertical: rel(self.force * sb, m * g),
            precession_rate: rel(w * w, m * g * l / (2.0 * j * sb * sb * cb) / (p * p)),
            centripetal: rel(self.force * cb / m, w * w * self.h_bar_x),
            radius: rel(self.h_bar_x, 2.0 * p * p * j * sb * cb * cb / (m * l)),
            tangential: rel(self.v_bar_y, w * self.h_bar_x),
            speed: rel(
                self.v_bar_y * self.v_bar_y,
                p * p * 2.0 * j * g * cb * cb * cb / (m * l),
            ),
        }
    }

    /// Period of one full precession turn (s).
    pub fn period(&self) -> f64 {
        2.0 * PI / self.alpha_dot
    }
}

/// Steady juggling at a small `Δα*` compared with the precession limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitComparison {
    pub delta_alpha_star: f64,
    pub fixed_point: FixedPoint,
    pub limit: PrecessionState,
    /// Mean strike force `I*/δ*` (N).
    pub mean_force: f64,
    /// Relative errors of `(h̄x, v̄y, α̇, F, r)`.
    pub relative: [f64; 5],
    /// Absolute values of `(v̄x, v̄z, β̇)`, which vanish in the limit.
    pub vanishing: [f64; 3],
}

impl LimitComparison {
    pub fn max_relative(&self) -> f64 {
        self.relative.iter().fold(0.0, |a, b| a.max(b.abs()))
    }

    pub fn max_vanishing(&self) -> f64 {
        self.vanishing.iter().fold(0.0, |a, b| a.max(b.abs()))
    }
}

/// Solves steady juggling at `δ* = p·δ_min` for a small `Δα*` and compares
/// it with [`precession_limit`] using `F = I*/δ*`.
pub fn compare_with_limit(
    beta_star: f64,
    p_free: f64,
    delta_alpha_star: f64,
    params: &StickParams,
) -> Result<LimitComparison> {
    let limit = precession_limit(beta_star, p_free, params)?;
    let spec = JuggleSpec::with_multiplier(beta_star, p_free, delta_alpha_star);
    let fp = solve_fixed_point(&spec, params, None)?;
    let mean_force = fp.u_star.impulse / fp.delta_star;
    let y = &fp.y_star;
    Ok(LimitComparison {
        delta_alpha_star,
        fixed_point: fp,
        limit,
        mean_force,
        relative: [
            rel(y.h.x, limit.h_bar_x),
            rel(y.v.y, limit.v_bar_y),
            rel(y.alpha_dot, limit.alpha_dot),
            rel(mean_force, limit.force),
            rel(fp.u_star.offset, limit.offset),
        ],
        vanishing: [y.v.x, y.v.z, y.beta_dot],
    })
}
