//! Section states and the one-strike return maps.
//!
//! A return map takes the state just before strike `k` to the state just
//! before strike `k+1`. In the inertial frame the steady juggling motion is
//! periodic but not stationary, because `{hx, hy, vx, vy, α}` keep rotating.
//! Re-expressing each state in a frame rotated by the current `α_k` (the
//! juggler frame) removes those coordinates and turns steady juggling into a
//! fixed point.

use nalgebra::SVector;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::flight::{flight_constants, precession_increment, propagate_flight, FlightConstants};
use crate::impulse::{apply_impulse, check_section, ControlInput, Frame, SectionVelocities};
use crate::params::StickParams;
use crate::rotations::rot_z;
use crate::Vec3;

/// Dimension of the juggler-frame section state.
pub const STATE_DIM: usize = 8;
/// Number of strike parameters.
pub const INPUT_DIM: usize = 3;

pub type StateVector = SVector<f64, STATE_DIM>;
pub type InputVector = SVector<f64, INPUT_DIM>;

/// Point on the inertial section `β = β*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionStateInertial {
    pub h: Vec3,
    pub v: Vec3,
    /// Cumulative precession angle (not wrapped).
    pub alpha: f64,
    pub alpha_dot: f64,
    pub beta_dot: f64,
}

impl SectionStateInertial {
    /// Expresses the state in the juggler frame rotated by `alpha_k`.
    pub fn to_juggler(&self, alpha_k: f64) -> SectionStateJuggler {
        let r = rot_z(alpha_k).inverse();
        SectionStateJuggler {
            h: r * self.h,
            v: r * self.v,
            alpha_dot: self.alpha_dot,
            beta_dot: self.beta_dot,
        }
    }

    pub fn velocities(&self) -> SectionVelocities {
        SectionVelocities::new(self.v, self.alpha_dot, self.beta_dot)
    }

    pub fn is_finite(&self) -> bool {
        self.h.iter().chain(self.v.iter()).all(|x| x.is_finite())
            && self.alpha.is_finite()
            && self.alpha_dot.is_finite()
            && self.beta_dot.is_finite()
    }
}

/// Point on the juggler-frame section,
/// `(h̄x, h̄y, h̄z, v̄x, v̄y, v̄z, α̇, β̇)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionStateJuggler {
    pub h: Vec3,
    pub v: Vec3,
    pub alpha_dot: f64,
    pub beta_dot: f64,
}

impl SectionStateJuggler {
    pub fn to_inertial(&self, alpha_k: f64) -> SectionStateInertial {
        let r = rot_z(alpha_k);
        SectionStateInertial {
            h: r * self.h,
            v: r * self.v,
            alpha: alpha_k,
            alpha_dot: self.alpha_dot,
            beta_dot: self.beta_dot,
        }
    }

    pub fn to_vector(&self) -> StateVector {
        StateVector::from_column_slice(&[
            self.h.x,
            self.h.y,
            self.h.z,
            self.v.x,
            self.v.y,
            self.v.z,
            self.alpha_dot,
            self.beta_dot,
        ])
    }

    pub fn from_vector(y: &StateVector) -> Self {
        Self {
            h: Vec3::new(y[0], y[1], y[2]),
            v: Vec3::new(y[3], y[4], y[5]),
            alpha_dot: y[6],
            beta_dot: y[7],
        }
    }

    pub fn velocities(&self) -> SectionVelocities {
        SectionVelocities::new(self.v, self.alpha_dot, self.beta_dot)
    }
}

/// One strike and the flight that follows it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord<S> {
    pub pre: S,
    pub input: ControlInput,
    pub post_impulse: SectionVelocities,
    pub flight: FlightConstants,
    /// Precession increment `Δα_k` in `(0, 2π)`.
    pub delta_alpha: f64,
    pub next: S,
}

/// The section `β = β*` for a given stick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Section {
    beta_star: f64,
    params: StickParams,
}

impl Section {
    pub fn new(beta_star: f64, params: StickParams) -> Result<Self> {
        check_section(beta_star)?;
        params.validate()?;
        Ok(Self { beta_star, params })
    }

    #[inline]
    pub fn beta_star(&self) -> f64 {
        self.beta_star
    }

    #[inline]
    pub fn params(&self) -> &StickParams {
        &self.params
    }

    /// Inertial-frame return map.
    pub fn map_inertial(
        &self,
        y: &SectionStateInertial,
        u: &ControlInput,
    ) -> Result<(SectionStateInertial, StepRecord<SectionStateInertial>)> {
        let post = apply_impulse(
            &y.velocities(),
            u,
            y.alpha,
            self.beta_star,
            &self.params,
            Frame::Inertial,
        )?;
        let fc = flight_constants(post.alpha_dot, post.beta_dot, self.beta_star)?;
        let delta_alpha = precession_increment(post.alpha_dot, post.beta_dot, self.beta_star)?;
        let start = SectionStateInertial {
            v: post.v,
            alpha_dot: post.alpha_dot,
            beta_dot: post.beta_dot,
            ..*y
        };
        let next = propagate_flight(&start, &fc, self.beta_star, &self.params)?;
        let record = StepRecord {
            pre: *y,
            input: *u,
            post_impulse: post,
            flight: fc,
            delta_alpha,
            next,
        };
        Ok((next, record))
    }

    /// Juggler-frame return map: flight in the current juggler frame, then
    /// rotation by `Rzᵀ(Δα_k)` into the next one. Rates are not rotated.
    pub fn map_juggler(
        &self,
        y: &SectionStateJuggler,
        u: &ControlInput,
    ) -> Result<(SectionStateJuggler, StepRecord<SectionStateJuggler>)> {
        let post = apply_impulse(
            &y.velocities(),
            u,
            0.0,
            self.beta_star,
            &self.params,
            Frame::Juggler,
        )?;
        let fc = flight_constants(post.alpha_dot, post.beta_dot, self.beta_star)?;
        let start = SectionStateInertial {
            h: y.h,
            v: post.v,
            alpha: 0.0,
            alpha_dot: post.alpha_dot,
            beta_dot: post.beta_dot,
        };
        let flown = propagate_flight(&start, &fc, self.beta_star, &self.params)?;
        let delta_alpha = flown.alpha;
        let next = flown.to_juggler(delta_alpha);
        let record = StepRecord {
            pre: *y,
            input: *u,
            post_impulse: post,
            flight: fc,
            delta_alpha,
            next,
        };
        Ok((next, record))
    }

    /// [`Section::map_juggler`] on flat vectors.
    pub fn map_juggler_vector(&self, y: &StateVector, u: &InputVector) -> Result<StateVector> {
        let input = ControlInput::new(u[0], u[1], u[2]);
        let (next, _) = self.map_juggler(&SectionStateJuggler::from_vector(y), &input)?;
        Ok(next.to_vector())
    }
}
