//! Elementary rotations and zyz Euler-angle kinematics of the stick.
//!
//! The stick orientation is `R = Rz(α) Ry(β) Rz(γ)`. Because the stick is
//! slender and axisymmetric, `γ` never enters the dynamics; callers fix it
//! to zero and it is kept here only so [`EulerZyz::to_rotation`] is a full
//! parameterization.

use nalgebra::{Matrix3, Rotation3};
use serde::{Deserialize, Serialize};

#[allow(unused_imports)]
use crate::math::Float;
use crate::Vec3;

/// Rotation about the y axis by `theta`.
pub fn rot_y(theta: f64) -> Rotation3<f64> {
    let (s, c) = theta.sin_cos();
    #[rustfmt::skip]
    let m = Matrix3::new(
          c, 0.0,   s,
        0.0, 1.0, 0.0,
         -s, 0.0,   c,
    );
    Rotation3::from_matrix_unchecked(m)
}

/// Rotation about the z axis by `theta`.
pub fn rot_z(theta: f64) -> Rotation3<f64> {
    let (s, c) = theta.sin_cos();
    #[rustfmt::skip]
    let m = Matrix3::new(
          c,  -s, 0.0,
          s,   c, 0.0,
        0.0, 0.0, 1.0,
    );
    Rotation3::from_matrix_unchecked(m)
}

/// zyz Euler angles (radians). `alpha` is the cumulative precession angle
/// and is never wrapped; `beta` is the tilt from the vertical.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EulerZyz {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EulerZyz {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }

    /// Body-to-inertial rotation `Rz(α) Ry(β) Rz(γ)`.
    pub fn to_rotation(&self) -> Rotation3<f64> {
        rot_z(self.alpha) * rot_y(self.beta) * rot_z(self.gamma)
    }

    /// Unit vector along the stick axis (body `z₃`) in the inertial frame.
    pub fn axis(&self) -> Vec3 {
        stick_axis(self.alpha, self.beta)
    }
}

/// Unit vector along the stick, `(cos α sin β, sin α sin β, cos β)`.
pub fn stick_axis(alpha: f64, beta: f64) -> Vec3 {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    Vec3::new(ca * sb, sa * sb, cb)
}

/// Matrix `S` mapping Euler rates `(α̇, β̇, γ̇)` to the inertial angular
/// velocity. Its determinant is `-sin β`, so it is singular at `β = 0`.
pub fn euler_rate_matrix(alpha: f64, beta: f64) -> Matrix3<f64> {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    #[rustfmt::skip]
    let s = Matrix3::new(
        0.0, -sa, ca * sb,
        0.0,  ca, sa * sb,
        1.0, 0.0, cb,
    );
    s
}

/// Inertial-frame inertia tensor `R diag(J, J, 0) Rᵀ` of the slender stick.
pub fn inertia_tensor(euler: &EulerZyz, inertia: f64) -> Matrix3<f64> {
    let r = euler.to_rotation();
    let body = Matrix3::from_diagonal(&Vec3::new(inertia, inertia, 0.0));
    r.matrix() * body * r.matrix().transpose()
}

/// Closed form of `J·S`; the third column vanishes, so the angular momentum
/// does not depend on `γ̇`.
pub fn momentum_matrix(alpha: f64, beta: f64, inertia: f64) -> Matrix3<f64> {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    #[rustfmt::skip]
    let js = Matrix3::new(
        -ca * sb * cb, -sa, 0.0,
        -sa * sb * cb,  ca, 0.0,
              sb * sb, 0.0, 0.0,
    );
    js * inertia
}

/// Angular momentum about the center of mass in the inertial frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngularMomentum {
    /// `(Hx, Hy, Hz)` in kg·m²/s.
    pub h: Vec3,
}

impl AngularMomentum {
    #[inline]
    pub fn z(&self) -> f64 {
        self.h.z
    }
}

pub fn angular_momentum(
    alpha: f64,
    beta: f64,
    alpha_dot: f64,
    beta_dot: f64,
    inertia: f64,
) -> AngularMomentum {
    let h = momentum_matrix(alpha, beta, inertia) * Vec3::new(alpha_dot, beta_dot, 0.0);
    AngularMomentum { h }
}
