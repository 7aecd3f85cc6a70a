use juggle_core::impulse::{
    application_point_inertial, apply_impulse, impulse_direction_inertial,
    impulse_direction_juggler,
};
use juggle_core::rotations::{
    angular_momentum, euler_rate_matrix, momentum_matrix, rot_y, rot_z, stick_axis,
};
use juggle_core::{ControlInput, Frame, SectionVelocities, StickParams, Vec3};
use nalgebra::Matrix3;
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};

fn rz(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

fn ry(b: f64) -> Matrix3<f64> {
    let (s, c) = b.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

/// Columns map `(α̇, β̇, γ̇)` to the angular velocity of a zyz body.
fn rate_matrix(a: f64, b: f64) -> Matrix3<f64> {
    let z = Vec3::z();
    let col1 = rz(a) * Vec3::y();
    let col2 = rz(a) * ry(b) * z;
    Matrix3::from_columns(&[z, col1, col2])
}

fn inertia_world(a: f64, b: f64, j: f64) -> Matrix3<f64> {
    let r = rz(a) * ry(b);
    r * Matrix3::from_diagonal(&Vec3::new(j, j, 0.0)) * r.transpose()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn momentum_matrix_matches_rotated_tensor(a in -2.0 * PI..2.0 * PI, b in 0.01..PI - 0.01, j in 1e-4..1.0) {
        let closed = momentum_matrix(a, b, j);
        let reference = inertia_world(a, b, j) * rate_matrix(a, b);
        prop_assert!((closed - reference).amax() < 1e-12 * j.max(1.0));
        prop_assert!(closed.column(2).amax() < 1e-15);
        let sv = closed.singular_values();
        let smax = sv.max();
        prop_assert_eq!(sv.iter().filter(|s| **s > 1e-10 * smax).count(), 2);
    }

    #[test]
    fn rotations_are_proper_orthogonal(t in -10.0..10.0f64) {
        for r in [rot_y(t).into_inner(), rot_z(t).into_inner()] {
            prop_assert!((r * r.transpose() - Matrix3::identity()).amax() < 1e-15);
            prop_assert!((r.determinant() - 1.0).abs() < 1e-15);
        }
        prop_assert!((rot_z(t).into_inner() - rz(t)).amax() < 1e-15);
        prop_assert!((rot_y(t).into_inner() - ry(t)).amax() < 1e-15);
    }

    #[test]
    fn euler_rates_and_axis(a in -PI..PI, b in 0.01..PI - 0.01) {
        let s = euler_rate_matrix(a, b);
        prop_assert!((s - rate_matrix(a, b)).amax() < 1e-15);
        prop_assert!((s.determinant() + b.sin()).abs() < 1e-14);
        prop_assert!((stick_axis(a, b) - rz(a) * ry(b) * Vec3::z()).norm() < 1e-15);
    }

    #[test]
    fn strike_changes_momenta_by_impulse_and_its_moment(
        alpha in -PI..PI,
        beta in 0.1..FRAC_PI_2 - 0.05,
        ad in -5.0..5.0f64,
        bd in 0.1..5.0f64,
        impulse in 0.0..2.0f64,
        frac in 0.0..1.0f64,
        phi in -1.0..1.0f64,
        vx in -3.0..3.0f64, vy in -3.0..3.0f64, vz in -3.0..3.0f64,
    ) {
        let p = StickParams::default();
        let u = ControlInput::new(impulse, frac * p.half_length(), phi);
        let pre = SectionVelocities::new(Vec3::new(vx, vy, vz), ad, bd);
        let post = apply_impulse(&pre, &u, alpha, beta, &p, Frame::Inertial).unwrap();

        let f = impulse_direction_inertial(alpha, beta, phi);
        prop_assert!((f.norm() - 1.0).abs() < 1e-14);
        prop_assert!(f.dot(&stick_axis(alpha, beta)).abs() < 1e-14);
        prop_assert!((p.mass * (post.v - pre.v) - impulse * f).norm() < 1e-13);

        let h_pre = angular_momentum(alpha, beta, pre.alpha_dot, pre.beta_dot, p.inertia).h;
        let h_post = angular_momentum(alpha, beta, post.alpha_dot, post.beta_dot, p.inertia).h;
        let r = application_point_inertial(alpha, beta, u.offset, &p).unwrap();
        let moment = r.cross(&(f * impulse));
        prop_assert!((h_post - h_pre - moment).norm() < 1e-12 * (1.0 + h_pre.norm()));
    }

    #[test]
    fn strike_is_frame_equivariant(
        alpha in -PI..PI,
        beta in 0.1..FRAC_PI_2 - 0.05,
        ad in -5.0..5.0f64,
        bd in 0.1..5.0f64,
        impulse in 0.0..2.0f64,
        frac in 0.0..1.0f64,
        phi in -1.0..1.0f64,
        vx in -3.0..3.0f64, vy in -3.0..3.0f64, vz in -3.0..3.0f64,
    ) {
        let p = StickParams::default();
        let u = ControlInput::new(impulse, frac * p.half_length(), phi);
        let v = Vec3::new(vx, vy, vz);
        let inertial = apply_impulse(&SectionVelocities::new(v, ad, bd), &u, alpha, beta, &p, Frame::Inertial).unwrap();
        let v_bar = rz(alpha).transpose() * v;
        let juggler = apply_impulse(&SectionVelocities::new(v_bar, ad, bd), &u, alpha, beta, &p, Frame::Juggler).unwrap();
        prop_assert!((rz(alpha) * juggler.v - inertial.v).norm() < 1e-13);
        prop_assert_eq!(juggler.alpha_dot, inertial.alpha_dot);
        prop_assert_eq!(juggler.beta_dot, inertial.beta_dot);
        let f = impulse_direction_juggler(beta, phi);
        prop_assert!((rz(alpha) * f - impulse_direction_inertial(alpha, beta, phi)).norm() < 1e-14);
    }
}

#[test]
fn offset_beyond_stick_end_is_rejected() {
    let p = StickParams::default();
    assert!(application_point_inertial(0.0, 1.0, 0.2501, &p).is_err());
    assert!(application_point_inertial(0.0, 1.0, -1e-9, &p).is_err());
    assert!(application_point_inertial(0.0, 1.0, 0.25, &p).is_ok());
}
