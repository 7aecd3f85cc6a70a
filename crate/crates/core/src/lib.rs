//! Hybrid dynamics and orbital stabilization of a slender stick juggled in
//! three dimensions by intermittent impulsive forces.
//!
//! The stick is struck only when its polar angle `β` reaches a fixed value
//! `β*`. Between strikes it flies torque-free under gravity, which admits a
//! closed-form return map on the section `β = β*`. Written in a frame that
//! rotates with the juggler, rotationally symmetric steady juggling becomes a
//! fixed point of that map; the fixed point is available in closed form and
//! is stabilized by linearizing the map and closing a discrete LQR loop.
//!
//! Module map:
//!
//! * [`rotations`]: zyz Euler kinematics, inertia and angular momentum.
//! * [`impulse`]: velocity jumps produced by a strike `(I, r, φ)`.
//! * [`flight`]: closed-form ballistic phase and dense trajectory samples.
//! * [`poincare`]: section states and the return maps in both frames.
//! * [`steady`]: steady juggling fixed points, planar and precession limits.
//! * [`icpm`]: Jacobians of the return map, controllability and LQR gains.
//! * [`sim`]: closed-loop runs with measurement noise and actuation loss.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
// `!(x < y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod flight;
pub mod icpm;
pub mod impulse;
pub mod params;
pub mod poincare;
pub mod rotations;
pub mod sim;
pub mod steady;

pub(crate) mod math;

pub use error::{Error, Result};
pub use flight::{FlightConstants, FlightSample};
pub use icpm::{GainMatrix, LinearizedMap};
pub use impulse::{ControlInput, Frame, SectionVelocities};
pub use params::StickParams;
pub use poincare::{Section, SectionStateInertial, SectionStateJuggler, StepRecord};
pub use sim::{run_closed_loop, NoiseSpec, SimConfig, SimLog};
pub use steady::{FixedPoint, JuggleSpec, PrecessionState};

/// 3-vector used for positions, velocities and angular momenta.
pub type Vec3 = nalgebra::Vector3<f64>;
