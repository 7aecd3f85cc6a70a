use juggle_core::flight::{flight_constants, propagate_flight, FreeFlight};
use juggle_core::rotations::rot_z;
use juggle_core::sim::{
    impulse_loss, perturb, run_closed_loop, settle_to_section, FreeState, NoiseSpec, SimConfig,
};
use juggle_core::{Error, Section, SectionStateInertial, StickParams, Vec3};
use juggle_oracles::ks_uniform;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_3, PI};

fn noisy(seed: u64, n_steps: usize) -> SimConfig {
    SimConfig {
        noise: Some(NoiseSpec::default()),
        seed: Some(seed),
        n_steps,
        ..SimConfig::default()
    }
}

#[test]
fn steady_start_stays_put() {
    let base = SimConfig::default();
    let fp = juggle_core::sim::design(&base).unwrap().0;
    let cfg = SimConfig {
        initial_state: fp.y_star,
        n_steps: 30,
        ..base
    };
    let log = run_closed_loop(&cfg).unwrap();
    for e in log.errors() {
        assert!(e.amax() < 1e-12, "{:e}", e.amax());
    }
    for s in &log.steps {
        let du = s.applied.to_array();
        let u0 = fp.u_star.to_array();
        for i in 0..3 {
            assert!((du[i] - u0[i]).abs() < 1e-10);
        }
        assert!((s.record.delta_alpha - 2.0 * PI / 3.0).abs() < 1e-9);
    }
}

#[test]
fn reference_run_converges() {
    let log = run_closed_loop(&SimConfig::default()).unwrap();
    let k = log.summary.convergence_step.expect("no convergence");
    assert!(k <= 15, "converged at {k}");
    let s20 = &log.steps[19];
    assert!((s20.record.delta_alpha - 2.0 * PI / 3.0).abs() < 1e-4);
    assert!((s20.record.flight.delta - 0.6).abs() < 1e-4);
    assert_eq!(log.summary.impulse_saturations, 0);
    assert_eq!(log.summary.offset_saturations, 0);
}

#[test]
fn logs_replay_through_the_map() {
    let cfg = SimConfig {
        render_samples_per_flight: 8,
        ..SimConfig::default()
    };
    let log = run_closed_loop(&cfg).unwrap();
    let section = Section::new(log.fixed_point.beta_star, cfg.params).unwrap();
    let mut y = cfg.initial_state;
    for s in &log.steps {
        assert_eq!(s.state, y);
        assert_eq!(s.measured, s.state);
        let (next, _) = section.map_juggler(&y, &s.applied).unwrap();
        assert!((next.to_vector() - s.record.next.to_vector()).amax() < 1e-9);
        y = next;
    }
    assert_eq!(y, log.final_state);
}

#[test]
fn runs_are_reproducible() {
    let a = run_closed_loop(&noisy(11, 60)).unwrap();
    let b = run_closed_loop(&noisy(11, 60)).unwrap();
    assert_eq!(a, b);
    let c = run_closed_loop(&noisy(12, 60)).unwrap();
    assert_ne!(a.final_state, c.final_state);
    for s in &a.steps {
        assert!(s.applied.impulse <= s.actuation.input.impulse);
        assert!(s.applied.impulse >= 0.975 * s.actuation.input.impulse);
    }
}

#[test]
fn noisy_runs_stay_bounded() {
    for seed in 0..4 {
        let log = run_closed_loop(&noisy(seed, 200)).unwrap();
        let tail = log.errors()[30..]
            .iter()
            .map(|e| e.norm())
            .fold(0.0, f64::max);
        assert!(tail.is_finite() && tail < 1.0, "seed {seed}: {tail}");
    }
}

#[test]
fn noise_draws_are_uniform() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let n = 100_000;
    let rel: Vec<f64> = (0..n)
        .map(|_| perturb(2.0, 0.025, &mut rng) / 2.0 - 1.0)
        .collect();
    let (_, p) = ks_uniform(&rel, -0.025, 0.025);
    assert!(p > 0.01, "p = {p}");
    let loss: Vec<f64> = (0..n)
        .map(|_| 1.0 - impulse_loss(1.0, 0.025, &mut rng))
        .collect();
    let (_, p) = ks_uniform(&loss, 0.0, 0.025);
    assert!(p > 0.01, "p = {p}");
}

#[test]
fn settling_from_the_lowest_tilt_takes_half_a_flight() {
    let p = StickParams::default();
    let beta = FRAC_PI_3;
    for (ad, bd) in [(2.5, -1.8), (-1.0, -3.0), (4.0, -0.7)] {
        let post = SectionStateInertial {
            h: Vec3::new(0.3, -0.1, 1.0),
            v: Vec3::new(0.5, 0.2, 2.0),
            alpha: 0.4,
            alpha_dot: ad,
            beta_dot: bd,
        };
        let fc = flight_constants(ad, bd, beta).unwrap();
        let mid = FreeFlight::from_section(&post, beta, &p).at(0.5 * fc.delta);
        assert!((mid.beta - fc.beta_min).abs() < 1e-9);
        let free = FreeState {
            h: mid.h,
            v: mid.v,
            alpha: mid.alpha,
            beta: mid.beta,
            alpha_dot: mid.alpha_dot,
            beta_dot: mid.beta_dot,
        };
        let arrival = settle_to_section(&free, &p, beta, 5.0).unwrap();
        assert!((arrival.time - 0.5 * fc.delta).abs() < 1e-9);
        let next = propagate_flight(&post, &fc, beta, &p).unwrap();
        assert!((arrival.state.h - next.h).norm() < 1e-8);
        assert!((arrival.state.v - next.v).norm() < 1e-8);
        assert!((arrival.state.alpha_dot - next.alpha_dot).abs() < 1e-6);
        assert!((arrival.state.beta_dot - next.beta_dot).abs() < 1e-6);
        let gap = (arrival.state.alpha - next.alpha).rem_euclid(2.0 * PI);
        assert!(gap.min(2.0 * PI - gap) < 1e-8);
    }
}

#[test]
fn settling_reports_missing_crossing() {
    let p = StickParams::default();
    let free = FreeState {
        h: Vec3::zeros(),
        v: Vec3::zeros(),
        alpha: 0.0,
        beta: 0.9,
        alpha_dot: 0.0,
        beta_dot: -0.4,
    };
    assert!(matches!(
        settle_to_section(&free, &p, 1.2, 0.5),
        Err(Error::NoSectionCrossing { .. })
    ));
}

#[test]
fn inertial_trajectory_has_rotational_symmetry() {
    let cfg = SimConfig {
        n_steps: 40,
        render_samples_per_flight: 16,
        ..SimConfig::default()
    };
    let log = run_closed_loop(&cfg).unwrap();
    let beta = log.fixed_point.beta_star;
    let rot = rot_z(2.0 * PI / 3.0);
    for w in log.steps[30..].windows(2) {
        let a = w[0].state.to_inertial(w[0].alpha);
        let b = w[1].state.to_inertial(w[1].alpha);
        assert!((rot * a.h - b.h).norm() < 1e-6);
        assert!((rot * a.v - b.v).norm() < 1e-6);
    }
    for (k, s) in log.steps.iter().enumerate() {
        let first = s.samples.first().unwrap();
        let last = s.samples.last().unwrap();
        assert!((first.beta - beta).abs() < 1e-12);
        assert!((last.beta - beta).abs() < 1e-9);
        assert!((first.t - s.time).abs() < 1e-12);
        assert!((first.alpha - s.alpha).abs() < 1e-12);
        if let Some(next) = log.steps.get(k + 1) {
            assert!((last.t - next.time).abs() < 1e-12);
            assert!((last.h - next.state.to_inertial(next.alpha).h).norm() < 1e-9);
        }
    }
}
