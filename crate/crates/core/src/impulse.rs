//! Velocity jumps produced by a strike on the section `β = β*`.
//!
//! The strike acts normal to the stick, in the plane spanned by the
//! intermediate `x₂y₂` axes, at signed distance `r` from the center of mass
//! along the stick. Positions do not change across the strike.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
#[allow(unused_imports)]
use crate::math::Float;
use crate::params::StickParams;
use crate::rotations::stick_axis;
use crate::Vec3;

/// `sin β*` at or below this is treated as a degenerate section.
pub const MIN_SIN_BETA: f64 = 1e-9;

/// Strike parameters `(I, r, φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlInput {
    /// Impulse magnitude `I` (N·s), non-negative.
    pub impulse: f64,
    /// Application offset `r` (m) along the stick, in `[0, ℓ/2]`.
    pub offset: f64,
    /// Direction `φ` (rad) of the impulse in the `x₂y₂` plane.
    pub phi: f64,
}

impl ControlInput {
    pub const fn new(impulse: f64, offset: f64, phi: f64) -> Self {
        Self {
            impulse,
            offset,
            phi,
        }
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.impulse, self.offset, self.phi]
    }

    pub fn from_array(u: [f64; 3]) -> Self {
        Self::new(u[0], u[1], u[2])
    }
}

/// Frame in which translational quantities are expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    /// Fixed `xyz` frame.
    Inertial,
    /// Frame rotated about `z` by the precession angle `α_k` at the strike.
    Juggler,
}

/// Center-of-mass velocity and the two relevant Euler rates on the section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionVelocities {
    pub v: Vec3,
    pub alpha_dot: f64,
    pub beta_dot: f64,
}

impl SectionVelocities {
    pub fn new(v: Vec3, alpha_dot: f64, beta_dot: f64) -> Self {
        Self {
            v,
            alpha_dot,
            beta_dot,
        }
    }

    /// Kinetic energy `m|v|²/2 + J(α̇² sin²β + β̇²)/2` with `β = β*`.
    pub fn kinetic_energy(&self, beta_star: f64, p: &StickParams) -> f64 {
        let sb = beta_star.sin();
        0.5 * p.mass * self.v.norm_squared()
            + 0.5
                * p.inertia
                * (self.alpha_dot * self.alpha_dot * sb * sb + self.beta_dot * self.beta_dot)
    }
}

/// Unit direction `f_k` of the impulse in the inertial frame,
/// `Rz(α_k) Ry(β*) (-cos φ, -sin φ, 0)`.
pub fn impulse_direction_inertial(alpha_k: f64, beta_star: f64, phi: f64) -> Vec3 {
    let (sa, ca) = alpha_k.sin_cos();
    let (sb, cb) = beta_star.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vec3::new(sa * sp - ca * cb * cp, -ca * sp - sa * cb * cp, sb * cp)
}

/// Impulse direction in the juggler frame, `Rzᵀ(α_k) f_k`; independent of `α_k`.
pub fn impulse_direction_juggler(beta_star: f64, phi: f64) -> Vec3 {
    let (sb, cb) = beta_star.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vec3::new(-cb * cp, -sp, sb * cp)
}

/// Vector from the center of mass to the point where the impulse acts.
pub fn application_point_inertial(
    alpha_k: f64,
    beta_star: f64,
    offset: f64,
    p: &StickParams,
) -> Result<Vec3> {
    if !(0.0..=p.half_length()).contains(&offset) {
        return Err(Error::OffsetOutOfRange {
            offset,
            max: p.half_length(),
        });
    }
    Ok(stick_axis(alpha_k, beta_star) * offset)
}

pub(crate) fn check_section(beta_star: f64) -> Result<f64> {
    let sb = beta_star.sin();
    if !(sb > MIN_SIN_BETA) {
        return Err(Error::DegenerateSection { sin_beta: sb });
    }
    Ok(sb)
}

/// Rate jumps `(Δα̇, Δβ̇)` caused by the strike.
pub fn rate_jump(u: &ControlInput, beta_star: f64, p: &StickParams) -> Result<(f64, f64)> {
    let sb = check_section(beta_star)?;
    let (sp, cp) = u.phi.sin_cos();
    let moment = u.impulse * u.offset / p.inertia;
    Ok((-moment * sp / sb, -moment * cp))
}

/// Applies the linear and angular impulse-momentum relations.
///
/// In the juggler frame `alpha_k` is ignored. The result is not required to
/// have `β̇ < 0`; that is checked when the flight is computed.
pub fn apply_impulse(
    pre: &SectionVelocities,
    u: &ControlInput,
    alpha_k: f64,
    beta_star: f64,
    p: &StickParams,
    frame: Frame,
) -> Result<SectionVelocities> {
    let (d_alpha_dot, d_beta_dot) = rate_jump(u, beta_star, p)?;
    let f = match frame {
        Frame::Inertial => impulse_direction_inertial(alpha_k, beta_star, u.phi),
        Frame::Juggler => impulse_direction_juggler(beta_star, u.phi),
    };
    Ok(SectionVelocities {
        v: pre.v + f * (u.impulse / p.mass),
        alpha_dot: pre.alpha_dot + d_alpha_dot,
        beta_dot: pre.beta_dot + d_beta_dot,
    })
}
