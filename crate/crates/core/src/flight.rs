//! Torque-free ballistic flight between two strikes.
//!
//! After a strike with `β̇⁺ < 0` the stick tips toward the vertical, reaches
//! `β_min` and returns to `β*`. The angular momentum is conserved, which
//! gives the first integral `β̇² + K1 cot²β = K2` and closed forms for the
//! flight time, the precession increment and the rates at the next crossing.
//!
//! [`FreeFlight`] evaluates the same motion at arbitrary times. It uses a
//! different route from the section formulas: a slender stick with angular
//! momentum `H ⟂ axis` spins its axis uniformly about `H` at rate `|H|/J`.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::impulse::check_section;
use crate::math::wrap_positive;
#[allow(unused_imports)]
use crate::math::Float;
use crate::params::StickParams;
use crate::poincare::SectionStateInertial;
use crate::rotations::{angular_momentum, stick_axis};
use crate::Vec3;

/// Post-strike `β̇⁺` with `(β̇⁺)²` below this is rejected as a grazing flight.
pub const MIN_BETA_DOT_SQ: f64 = 1e-12;

/// Constants of one flight phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlightConstants {
    /// `K1 = sin⁴β* (α̇⁺)²` (rad²/s²).
    pub k1: f64,
    /// `K2 = sin²β* cos²β* (α̇⁺)² + (β̇⁺)²` (rad²/s²).
    pub k2: f64,
    /// Smallest tilt reached during the flight (rad).
    pub beta_min: f64,
    /// Time of flight `δ` (s).
    pub delta: f64,
}

fn check_descending(beta_dot_plus: f64) -> Result<()> {
    if !(beta_dot_plus < 0.0) {
        return Err(Error::NonDescendingPostImpulse {
            beta_dot: beta_dot_plus,
        });
    }
    if beta_dot_plus * beta_dot_plus < MIN_BETA_DOT_SQ {
        return Err(Error::GrazingFlight {
            beta_dot: beta_dot_plus,
        });
    }
    Ok(())
}

/// Flight constants from the post-strike rates.
pub fn flight_constants(
    alpha_dot_plus: f64,
    beta_dot_plus: f64,
    beta_star: f64,
) -> Result<FlightConstants> {
    let sb = check_section(beta_star)?;
    check_descending(beta_dot_plus)?;
    let cb = beta_star.cos();
    let ad2 = alpha_dot_plus * alpha_dot_plus;
    let bd2 = beta_dot_plus * beta_dot_plus;
    let k1 = sb * sb * sb * sb * ad2;
    let k2 = sb * sb * cb * cb * ad2 + bd2;

    // K2 - K1 cot²β* reduces to (β̇⁺)² exactly; using it directly avoids the
    // cancellation in the difference.
    let (beta_min, delta) = if k1 == 0.0 {
        // Planar flip: the axis passes through the vertical.
        (0.0, 2.0 * beta_star / k2.sqrt())
    } else {
        let beta_min = (k1 / k2).sqrt().atan();
        let w = (k1 + k2).sqrt();
        let delta = (PI - 2.0 * (w * (cb / sb) / beta_dot_plus.abs()).atan()) / w;
        (beta_min, delta)
    };
    Ok(FlightConstants {
        k1,
        k2,
        beta_min,
        delta,
    })
}

/// Change of the precession angle over one flight, in `(0, 2π)`.
///
/// With `β̇⁺ < 0` the arctangent argument has the sign of `-α̇⁺`, so the
/// principal branch lands in `(0, π]` for `α̇⁺ ≥ 0` and in `(π, 2π)` for
/// `α̇⁺ < 0`. In the second case the stick actually turns clockwise by
/// `2π - Δα`; both describe the same orientation.
pub fn precession_increment(
    alpha_dot_plus: f64,
    beta_dot_plus: f64,
    beta_star: f64,
) -> Result<f64> {
    check_section(beta_star)?;
    check_descending(beta_dot_plus)?;
    let (sb, cb) = beta_star.sin_cos();
    Ok(PI + 2.0 * (sb * cb * alpha_dot_plus / beta_dot_plus).atan())
}

/// State at the next crossing of the section, starting from the post-strike
/// state `post` (velocities already jumped).
///
/// Gravity acts along `z`, which both frames share, so this serves the
/// inertial and the juggler frame alike.
pub fn propagate_flight(
    post: &SectionStateInertial,
    fc: &FlightConstants,
    beta_star: f64,
    p: &StickParams,
) -> Result<SectionStateInertial> {
    let d_alpha = precession_increment(post.alpha_dot, post.beta_dot, beta_star)?;
    let d = fc.delta;
    let g = p.gravity;
    Ok(SectionStateInertial {
        h: post.h + post.v * d - Vec3::new(0.0, 0.0, 0.5 * g * d * d),
        v: post.v - Vec3::new(0.0, 0.0, g * d),
        alpha: post.alpha + d_alpha,
        alpha_dot: post.alpha_dot,
        beta_dot: -post.beta_dot,
    })
}

/// Azimuth differences this close to zero are taken as zero rather than as a
/// whole turn in the direction of precession.
const AZIMUTH_SLACK: f64 = 1e-9;

/// Dense sample of a flight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlightSample {
    pub t: f64,
    pub h: Vec3,
    pub v: Vec3,
    pub alpha: f64,
    pub beta: f64,
    pub alpha_dot: f64,
    pub beta_dot: f64,
}

/// Exact free flight from an arbitrary state (not necessarily on the section).
#[derive(Debug, Clone, Copy)]
pub struct FreeFlight {
    h0: Vec3,
    v0: Vec3,
    alpha0: f64,
    axis0: Vec3,
    /// Angular velocity `H/J`, perpendicular to the stick.
    omega: Vec3,
    gravity: f64,
}

impl FreeFlight {
    pub fn new(
        h: Vec3,
        v: Vec3,
        alpha: f64,
        beta: f64,
        alpha_dot: f64,
        beta_dot: f64,
        p: &StickParams,
    ) -> Self {
        let hm = angular_momentum(alpha, beta, alpha_dot, beta_dot, p.inertia);
        Self {
            h0: h,
            v0: v,
            alpha0: alpha,
            axis0: stick_axis(alpha, beta),
            omega: hm.h / p.inertia,
            gravity: p.gravity,
        }
    }

    pub fn from_section(s: &SectionStateInertial, beta_star: f64, p: &StickParams) -> Self {
        Self::new(s.h, s.v, s.alpha, beta_star, s.alpha_dot, s.beta_dot, p)
    }

    /// Period of the axis rotation, or `None` for a non-rotating stick.
    pub fn rotation_period(&self) -> Option<f64> {
        let w = self.omega.norm();
        (w > 0.0).then(|| TAU / w)
    }

    pub fn axis_at(&self, t: f64) -> Vec3 {
        let w = self.omega.norm();
        if w == 0.0 {
            return self.axis0;
        }
        let n = self.omega / w;
        let (s, c) = (w * t).sin_cos();
        self.axis0 * c + n.cross(&self.axis0) * s + n * (n.dot(&self.axis0) * (1.0 - c))
    }

    pub fn at(&self, t: f64) -> FlightSample {
        let g = self.gravity;
        let e = self.axis_at(t);
        let rho = (e.x * e.x + e.y * e.y).sqrt();
        let beta = rho.atan2(e.z);
        let sb = beta.sin();

        // α̇ = Hz/(J sin²β) keeps one sign through the flight, so the
        // precession is monotone and the azimuth can be unwrapped by sign.
        let wz = self.omega.z;
        let mut d_alpha = wrap_positive(e.y.atan2(e.x) - self.alpha0);
        if d_alpha > PI {
            d_alpha -= TAU;
        }
        // Round-off of either sign near a whole turn must not flip the branch.
        if wz > 0.0 && d_alpha < -AZIMUTH_SLACK {
            d_alpha += TAU;
        } else if wz < 0.0 && d_alpha > AZIMUTH_SLACK {
            d_alpha -= TAU;
        }
        if let Some(period) = self.rotation_period() {
            let turns = (t / period).floor();
            if wz != 0.0 && turns > 0.0 {
                d_alpha += turns * TAU * wz.signum();
            }
        }

        let e_dot = self.omega.cross(&e);
        FlightSample {
            t,
            h: self.h0 + self.v0 * t - Vec3::new(0.0, 0.0, 0.5 * g * t * t),
            v: self.v0 - Vec3::new(0.0, 0.0, g * t),
            alpha: self.alpha0 + d_alpha,
            beta,
            alpha_dot: wz / (sb * sb),
            beta_dot: -e_dot.z / sb,
        }
    }
}

/// `n_samples ≥ 2` uniformly spaced samples over `[0, δ]` of the flight
/// that starts from the post-strike state `post`.
pub fn render_flight(
    post: &SectionStateInertial,
    fc: &FlightConstants,
    beta_star: f64,
    p: &StickParams,
    n_samples: usize,
) -> Result<Vec<FlightSample>> {
    if n_samples < 2 {
        return Err(Error::InvalidConfig("render needs at least two samples"));
    }
    let flight = FreeFlight::from_section(post, beta_star, p);
    let last = (n_samples - 1) as f64;
    Ok((0..n_samples)
        .map(|i| flight.at(fc.delta * i as f64 / last))
        .collect())
}

/// Residual of the first integral `β̇² + K1 cot²β - K2` at a sample.
pub fn first_integral_residual(s: &FlightSample, fc: &FlightConstants) -> f64 {
    let cot = s.beta.cos() / s.beta.sin();
    s.beta_dot * s.beta_dot + fc.k1 * cot * cot - fc.k2
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_3;

    const B: f64 = FRAC_PI_3;

    #[test]
    fn planar_flight_time() {
        let bd = -2.0 * B / 0.6;
        let fc = flight_constants(0.0, bd, B).unwrap();
        assert_eq!(fc.k1, 0.0);
        assert_eq!(fc.beta_min, 0.0);
        assert!((fc.delta - 0.6).abs() < 1e-15);
    }

    #[test]
    fn planar_increment_is_half_turn() {
        assert_eq!(precession_increment(0.0, -1.3, B).unwrap(), PI);
    }

    #[test]
    fn rejects_non_descending() {
        assert!(matches!(
            flight_constants(1.0, 0.0, B),
            Err(Error::NonDescendingPostImpulse { .. })
        ));
        assert!(matches!(
            flight_constants(1.0, 0.5, B),
            Err(Error::NonDescendingPostImpulse { .. })
        ));
        assert!(matches!(
            precession_increment(1.0, 0.2, B),
            Err(Error::NonDescendingPostImpulse { .. })
        ));
        assert!(matches!(
            flight_constants(1.0, -1e-7, B),
            Err(Error::GrazingFlight { .. })
        ));
    }

    #[test]
    fn increment_range_and_sign() {
        let ccw = precession_increment(3.0, -1.0, B).unwrap();
        let cw = precession_increment(-3.0, -1.0, B).unwrap();
        assert!(ccw > 0.0 && ccw < PI);
        assert!(cw > PI && cw < TAU);
        assert!((ccw + cw - TAU).abs() < 1e-14);
    }

    #[test]
    fn propagate_bookkeeping() {
        let p = StickParams::default();
        let post = SectionStateInertial {
            h: Vec3::new(0.1, 0.2, 1.0),
            v: Vec3::new(0.5, -0.3, 2.0),
            alpha: 0.4,
            alpha_dot: 1.5,
            beta_dot: -2.0,
        };
        let fc = flight_constants(post.alpha_dot, post.beta_dot, B).unwrap();
        let next = propagate_flight(&post, &fc, B, &p).unwrap();
        assert_eq!(next.v.z - post.v.z, -p.gravity * fc.delta);
        assert_eq!(next.beta_dot, 2.0);
        assert_eq!(next.alpha_dot, 1.5);

        let tiny = FlightConstants { delta: 1e-12, ..fc };
        let next = propagate_flight(&post, &tiny, B, &p).unwrap();
        assert!((next.h - post.h).norm() < 1e-11);
        assert!((next.v - post.v).norm() < 1e-10);
    }

    #[test]
    fn render_two_samples_hits_endpoints() {
        let p = StickParams::default();
        let post = SectionStateInertial {
            h: Vec3::new(0.7, 0.0, 1.6),
            v: Vec3::new(1.2, 0.9, 1.0),
            alpha: 0.0,
            alpha_dot: 2.4,
            beta_dot: -1.8,
        };
        let fc = flight_constants(post.alpha_dot, post.beta_dot, B).unwrap();
        let s = render_flight(&post, &fc, B, &p, 2).unwrap();
        let next = propagate_flight(&post, &fc, B, &p).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s[0].beta - B).abs() < 1e-12);
        assert!((s[1].beta - B).abs() < 1e-8);
        assert!((s[1].alpha - next.alpha).abs() < 1e-8);
        assert!((s[1].beta_dot - next.beta_dot).abs() < 1e-8);
        assert!((s[1].h - next.h).norm() < 1e-12);
        assert!(render_flight(&post, &fc, B, &p, 1).is_err());
    }

    #[test]
    fn wrap_is_half_open() {
        assert_eq!(wrap_positive(0.0), 0.0);
        assert!((wrap_positive(-0.5) - (TAU - 0.5)).abs() < 1e-15);
        assert!((wrap_positive(TAU + 0.25) - 0.25).abs() < 1e-15);
    }
}
