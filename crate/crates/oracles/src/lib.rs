//! Reference computations for the test suites.
//!
//! Nothing here depends on `juggle-core`: each routine solves its problem by
//! brute-force numerics (fixed-step RK4, structure-preserving doubling,
//! empirical distributions) so the closed forms can be checked against it.

use nalgebra::{DMatrix, Vector3};

pub type V3 = Vector3<f64>;

fn rk4<const N: usize>(f: impl Fn(&[f64; N]) -> [f64; N], y: &[f64; N], h: f64) -> [f64; N] {
    let add = |a: &[f64; N], b: &[f64; N], s: f64| -> [f64; N] {
        core::array::from_fn(|i| a[i] + s * b[i])
    };
    let k1 = f(y);
    let k2 = f(&add(y, &k1, h / 2.0));
    let k3 = f(&add(y, &k2, h / 2.0));
    let k4 = f(&add(y, &k3, h));
    core::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

/// Outcome of integrating one ballistic flight from `β*` back to `β*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlightOracle {
    pub delta: f64,
    /// Continuous change of `α` over the flight (not wrapped).
    pub delta_alpha: f64,
    pub alpha_dot_end: f64,
    pub beta_dot_end: f64,
    /// Smallest `β` seen on the step grid.
    pub beta_min: f64,
    /// Integration step that passed the refinement check.
    pub step: f64,
}

/// Torque-free polar dynamics at fixed `c = H_z / J`:
/// `β̈ = c² cos β / sin³ β`, `α̇ = c / sin² β`. State `(β, β̇, α)`.
fn polar_rhs(c: f64) -> impl Fn(&[f64; 3]) -> [f64; 3] {
    move |y| {
        let (s, co) = y[0].sin_cos();
        [y[1], c * c * co / (s * s * s), c / (s * s)]
    }
}

fn flight_once(
    beta_star: f64,
    alpha_dot: f64,
    beta_dot: f64,
    h: f64,
    t_max: f64,
) -> Option<FlightOracle> {
    let c = alpha_dot * beta_star.sin().powi(2);
    let f = polar_rhs(c);
    let mut y = [beta_star, beta_dot, 0.0];
    let mut t = 0.0;
    let mut beta_min = beta_star;
    let mut turned = false;
    while t < t_max {
        let next = rk4(&f, &y, h);
        beta_min = beta_min.min(next[0]);
        if next[1] > 0.0 {
            turned = true;
        }
        if turned && next[0] >= beta_star {
            // Bisect on the length of a single RK4 step from the left end.
            let (mut lo, mut hi) = (0.0, h);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if rk4(&f, &y, mid)[0] < beta_star {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-15 {
                    break;
                }
            }
            let s = 0.5 * (lo + hi);
            let end = rk4(&f, &y, s);
            let sb = end[0].sin();
            return Some(FlightOracle {
                delta: t + s,
                delta_alpha: end[2],
                alpha_dot_end: c / (sb * sb),
                beta_dot_end: end[1],
                beta_min,
                step: h,
            });
        }
        y = next;
        t += h;
    }
    None
}

/// Integrates the flight that starts on `β = β*` with post-strike rates
/// `(α̇, β̇)`, `β̇ < 0`, until `β` climbs back through `β*`.
///
/// The step is halved until two successive resolutions agree on every
/// output to `tol`. Returns `None` if no crossing occurs before `t_max`.
pub fn integrate_flight(
    beta_star: f64,
    alpha_dot: f64,
    beta_dot: f64,
    tol: f64,
    t_max: f64,
) -> Option<FlightOracle> {
    let mut h = 1e-3;
    let mut prev = flight_once(beta_star, alpha_dot, beta_dot, h, t_max)?;
    for _ in 0..12 {
        h *= 0.5;
        let cur = flight_once(beta_star, alpha_dot, beta_dot, h, t_max)?;
        let diff = [
            cur.delta - prev.delta,
            cur.delta_alpha - prev.delta_alpha,
            cur.alpha_dot_end - prev.alpha_dot_end,
            cur.beta_dot_end - prev.beta_dot_end,
        ]
        .iter()
        .fold(0.0f64, |m, d| m.max(d.abs()));
        if diff < tol {
            return Some(cur);
        }
        prev = cur;
    }
    None
}

/// Rigid slender stick pushed by a force that stays normal to the stick in
/// its vertical plane, applied a fixed distance `r` along the axis from the
/// centre of mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hoop {
    pub mass: f64,
    pub inertia: f64,
    pub gravity: f64,
    pub force: f64,
    pub offset: f64,
}

/// `h, v, e, H` with `e` the unit stick axis and `H` the angular momentum
/// about the centre of mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoopState {
    pub h: V3,
    pub v: V3,
    pub e: V3,
    pub momentum: V3,
}

impl HoopState {
    fn pack(&self) -> [f64; 12] {
        let mut y = [0.0; 12];
        for (i, w) in [self.h, self.v, self.e, self.momentum].iter().enumerate() {
            y[3 * i..3 * i + 3].copy_from_slice(w.as_slice());
        }
        y
    }

    fn unpack(y: &[f64; 12]) -> Self {
        let v3 = |i: usize| V3::new(y[i], y[i + 1], y[i + 2]);
        Self {
            h: v3(0),
            v: v3(3),
            e: v3(6),
            momentum: v3(9),
        }
    }

    /// Polar angle of the axis.
    pub fn beta(&self) -> f64 {
        self.e.x.hypot(self.e.y).atan2(self.e.z)
    }

    /// Azimuth of the axis.
    pub fn alpha(&self) -> f64 {
        self.e.y.atan2(self.e.x)
    }

    /// `β̇` from `ė = (H/J) × e`.
    pub fn beta_dot(&self, inertia: f64) -> f64 {
        let e_dot = (self.momentum / inertia).cross(&self.e);
        -e_dot.z / self.e.x.hypot(self.e.y)
    }
}

/// Momentum of a stick with axis `e` turning at angular velocity `ω`.
pub fn stick_momentum(e: &V3, omega: &V3, inertia: f64) -> V3 {
    inertia * (omega - e * e.dot(omega))
}

impl Hoop {
    fn force_on(&self, e: &V3) -> V3 {
        let rho = e.x.hypot(e.y);
        self.force * V3::new(-e.x * e.z / rho, -e.y * e.z / rho, rho)
    }

    fn rhs(&self, y: &[f64; 12]) -> [f64; 12] {
        let s = HoopState::unpack(y);
        let f = self.force_on(&s.e);
        let a = f / self.mass - V3::new(0.0, 0.0, self.gravity);
        let e_dot = (s.momentum / self.inertia).cross(&s.e);
        let h_dot = self.offset * s.e.cross(&f);
        let mut out = [0.0; 12];
        for (i, w) in [s.v, a, e_dot, h_dot].iter().enumerate() {
            out[3 * i..3 * i + 3].copy_from_slice(w.as_slice());
        }
        out
    }

    /// Fixed-step RK4; `observe` sees every state including the first.
    pub fn integrate(
        &self,
        start: &HoopState,
        step: f64,
        n_steps: usize,
        mut observe: impl FnMut(f64, &HoopState),
    ) -> HoopState {
        let mut y = start.pack();
        observe(0.0, start);
        for i in 1..=n_steps {
            y = rk4(|y| self.rhs(y), &y, step);
            observe(i as f64 * step, &HoopState::unpack(&y));
        }
        HoopState::unpack(&y)
    }
}

/// Solution of `X = AᵀXA − AᵀXB(R + BᵀXB)⁻¹BᵀXA + Q` by the structure
/// preserving doubling algorithm, and the matching gain
/// `K = −(R + BᵀXB)⁻¹BᵀXA`.
pub fn dare_doubling(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
    tol: f64,
    max_iter: usize,
) -> Option<(DMatrix<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    let eye = DMatrix::<f64>::identity(n, n);
    let r_inv = r.clone().try_inverse()?;
    let mut ak = a.clone();
    let mut gk = b * &r_inv * b.transpose();
    let mut hk = q.clone();
    for _ in 0..max_iter {
        let w = (&eye + &gk * &hk).try_inverse()?;
        let a_next = &ak * &w * &ak;
        let g_next = &gk + &ak * &w * &gk * ak.transpose();
        let h_next = &hk + ak.transpose() * &hk * &w * &ak;
        let change = (&h_next - &hk).amax();
        let scale = h_next.amax().max(1.0);
        ak = a_next;
        gk = g_next;
        hk = h_next;
        if change <= tol * scale {
            let x = (&hk + hk.transpose()) * 0.5;
            let btx = b.transpose() * &x;
            let k = -(r + &btx * b).try_inverse()? * btx * a;
            return Some((x, k));
        }
    }
    None
}

/// One-sample Kolmogorov-Smirnov test against `U(lo, hi)`.
/// Returns the statistic `D` and the asymptotic p-value.
pub fn ks_uniform(samples: &[f64], lo: f64, hi: f64) -> (f64, f64) {
    let mut xs: Vec<f64> = samples.iter().map(|x| (x - lo) / (hi - lo)).collect();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let cdf = u.clamp(0.0, 1.0);
            (cdf - i as f64 / n).max((i + 1) as f64 / n - cdf)
        })
        .fold(0.0, f64::max);
    let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    (d, kolmogorov_survival(lambda))
}

/// `P(K > λ)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=200 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
