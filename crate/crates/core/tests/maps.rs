use juggle_core::poincare::Section;
use juggle_core::rotations::rot_z;
use juggle_core::{ControlInput, SectionStateJuggler, StickParams, Vec3};
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn state() -> impl Strategy<Value = SectionStateJuggler> {
    (
        prop::array::uniform3(-2.0..2.0f64),
        prop::array::uniform3(-3.0..3.0f64),
        -5.0..5.0f64,
        0.1..3.0f64,
    )
        .prop_map(|(h, v, ad, bd)| SectionStateJuggler {
            h: Vec3::from(h),
            v: Vec3::from(v),
            alpha_dot: ad,
            beta_dot: bd,
        })
}

fn strike() -> impl Strategy<Value = ControlInput> {
    (0.2..1.5f64, 0.01..0.25f64, -0.6..0.6f64).prop_map(|(i, r, phi)| ControlInput::new(i, r, phi))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn maps_commute_with_frame_rotation(
        beta in 0.2..FRAC_PI_2 - 0.05,
        alpha_k in -PI..PI,
        y in state(),
        u in strike(),
    ) {
        let section = Section::new(beta, StickParams::default()).unwrap();
        let juggler = section.map_juggler(&y, &u);
        let inertial = section.map_inertial(&y.to_inertial(alpha_k), &u);
        match (juggler, inertial) {
            (Ok((yj, rj)), Ok((yi, ri))) => {
                prop_assert!(angle_gap(rj.delta_alpha, ri.delta_alpha) < 1e-12);
                prop_assert!(angle_gap(yi.alpha, alpha_k + rj.delta_alpha) < 1e-10);
                let back = yi.to_juggler(alpha_k + rj.delta_alpha);
                let scale = 1.0 + yj.to_vector().amax();
                prop_assert!((back.to_vector() - yj.to_vector()).amax() < 1e-10 * scale);
                prop_assert!((rot_z(alpha_k) * rj.post_impulse.v - ri.post_impulse.v).norm() < 1e-12 * scale);
                prop_assert_eq!(rj.flight, ri.flight);
            }
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            (a, b) => prop_assert!(false, "frames disagree: {:?} / {:?}", a.err(), b.err()),
        }
    }

    #[test]
    fn juggler_map_round_trips_through_vectors(
        beta in 0.2..FRAC_PI_2 - 0.05,
        y in state(),
        u in strike(),
    ) {
        let section = Section::new(beta, StickParams::default()).unwrap();
        if let Ok((next, _)) = section.map_juggler(&y, &u) {
            let flat = section
                .map_juggler_vector(&y.to_vector(), &nalgebra::Vector3::new(u.impulse, u.offset, u.phi))
                .unwrap();
            prop_assert_eq!(flat, next.to_vector());
            prop_assert_eq!(SectionStateJuggler::from_vector(&flat), next);
        }
    }
}
