//! Impulse-controlled Poincaré map (ICPM) stabilization.
//!
//! The juggler-frame return map is linearized about a fixed point by
//! central finite differences, giving `e(k+1) = A e(k) + B u(k)` with
//! `e = Ȳ - Ȳ*` and `u = U - U*`. A discrete LQR gain `K` then closes the
//! loop as `u(k) = K e(k)`, i.e. the sign is folded into `K`.

use nalgebra::{DMatrix, DVector, SMatrix};

use crate::error::{Error, Result};
use crate::impulse::ControlInput;
#[allow(unused_imports)]
use crate::math::Float;
use crate::params::StickParams;
use crate::poincare::{
    InputVector, Section, SectionStateJuggler, StateVector, INPUT_DIM, STATE_DIM,
};
use crate::steady::FixedPoint;

/// Largest fixed-point residual accepted by [`linearize`].
pub const MAX_FIXED_POINT_RESIDUAL: f64 = 1e-6;
/// Default relative finite-difference step.
pub const DEFAULT_STEP_SCALE: f64 = 1e-6;
/// Relative singular-value threshold of [`controllability_rank`].
pub const RANK_TOLERANCE: f64 = 1e-8;
/// Relative convergence threshold of the Riccati iteration.
pub const RICCATI_TOLERANCE: f64 = 1e-12;
/// Iteration cap of the Riccati iteration.
pub const RICCATI_MAX_ITERATIONS: usize = 100_000;

pub type StateMatrix = SMatrix<f64, STATE_DIM, STATE_DIM>;
pub type InputMatrix = SMatrix<f64, STATE_DIM, INPUT_DIM>;

/// Linearization of the juggler-frame map about a fixed point.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearizedMap {
    /// State Jacobian `∂P̄/∂Ȳ`.
    pub a: StateMatrix,
    /// Input Jacobian `∂P̄/∂U`.
    pub b: InputMatrix,
    pub fixed_point: FixedPoint,
    pub params: StickParams,
    /// Finite-difference step used for each state coordinate.
    pub state_steps: StateVector,
    /// Finite-difference step used for each input coordinate.
    pub input_steps: InputVector,
}

fn fd_step(scale: f64, x: f64) -> f64 {
    scale * x.abs().max(1.0)
}

/// Five-point central difference `(-f(2h) + 8f(h) - 8f(-h) + f(-2h)) / 12h`.
///
/// The offset column of `B` is strongly curved at the small steady offsets,
/// so the three-point rule leaves an `O(h²)` error that is visible at the
/// default step.
fn central_difference(h: f64, f: impl Fn(f64) -> Result<StateVector>) -> Result<StateVector> {
    let (p1, m1, p2, m2) = (f(h)?, f(-h)?, f(2.0 * h)?, f(-2.0 * h)?);
    Ok(((p1 - m1) * 8.0 - (p2 - m2)) / (12.0 * h))
}

/// Central-difference Jacobians of the juggler-frame map at `fp`.
/// Column `j` uses the step `step_scale · max(1, |x_j|)`.
pub fn linearize(fp: &FixedPoint, params: &StickParams, step_scale: f64) -> Result<LinearizedMap> {
    if !(step_scale > 0.0 && step_scale.is_finite()) {
        return Err(Error::InvalidConfig(
            "finite-difference step must be positive",
        ));
    }
    let section = Section::new(fp.beta_star, *params)?;
    let residual = fp.residual(params)?;
    if !(residual <= MAX_FIXED_POINT_RESIDUAL) {
        return Err(Error::FixedPointDrift { residual });
    }

    let y0 = fp.y_star.to_vector();
    let u0 = InputVector::from(fp.u_star.to_array());

    let mut a = StateMatrix::zeros();
    let mut state_steps = StateVector::zeros();
    for j in 0..STATE_DIM {
        let h = fd_step(step_scale, y0[j]);
        let col = central_difference(h, |d| {
            let mut y = y0;
            y[j] += d;
            section.map_juggler_vector(&y, &u0)
        })?;
        a.set_column(j, &col);
        state_steps[j] = h;
    }

    let mut b = InputMatrix::zeros();
    let mut input_steps = InputVector::zeros();
    for j in 0..INPUT_DIM {
        let h = fd_step(step_scale, u0[j]);
        let col = central_difference(h, |d| {
            let mut u = u0;
            u[j] += d;
            section.map_juggler_vector(&y0, &u)
        })?;
        b.set_column(j, &col);
        input_steps[j] = h;
    }

    Ok(LinearizedMap {
        a,
        b,
        fixed_point: *fp,
        params: *params,
        state_steps,
        input_steps,
    })
}

/// Exact Jacobian rows of the two rate components of the map.
///
/// The rates are not rotated between frames and depend only on the strike,
/// so their rows follow directly from the impulse-momentum jumps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateRows {
    pub a_alpha_dot: [f64; STATE_DIM],
    pub a_beta_dot: [f64; STATE_DIM],
    pub b_alpha_dot: [f64; INPUT_DIM],
    pub b_beta_dot: [f64; INPUT_DIM],
}

pub fn exact_rate_rows(fp: &FixedPoint, params: &StickParams) -> RateRows {
    let ControlInput {
        impulse: i,
        offset: r,
        phi,
    } = fp.u_star;
    let j = params.inertia;
    let sb = fp.beta_star.sin();
    let (sp, cp) = phi.sin_cos();
    let mut a_alpha_dot = [0.0; STATE_DIM];
    a_alpha_dot[6] = 1.0;
    let mut a_beta_dot = [0.0; STATE_DIM];
    a_beta_dot[7] = -1.0;
    RateRows {
        a_alpha_dot,
        a_beta_dot,
        b_alpha_dot: [
            -r * sp / (j * sb),
            -i * sp / (j * sb),
            -i * r * cp / (j * sb),
        ],
        b_beta_dot: [r * cp / j, i * cp / j, -i * r * sp / j],
    }
}

impl LinearizedMap {
    pub fn a_dynamic(&self) -> DMatrix<f64> {
        DMatrix::from_column_slice(STATE_DIM, STATE_DIM, self.a.as_slice())
    }

    pub fn b_dynamic(&self) -> DMatrix<f64> {
        DMatrix::from_column_slice(STATE_DIM, INPUT_DIM, self.b.as_slice())
    }

    /// Largest deviation of the finite-difference rate rows from
    /// [`exact_rate_rows`].
    pub fn rate_row_error(&self) -> f64 {
        let rows = exact_rate_rows(&self.fixed_point, &self.params);
        let mut err: f64 = 0.0;
        for c in 0..STATE_DIM {
            err = err.max((self.a[(6, c)] - rows.a_alpha_dot[c]).abs());
            err = err.max((self.a[(7, c)] - rows.a_beta_dot[c]).abs());
        }
        for c in 0..INPUT_DIM {
            err = err.max((self.b[(6, c)] - rows.b_alpha_dot[c]).abs());
            err = err.max((self.b[(7, c)] - rows.b_beta_dot[c]).abs());
        }
        err
    }

    pub fn controllability_rank(&self) -> usize {
        controllability_rank(&self.a_dynamic(), &self.b_dynamic())
    }

    /// LQR gain for diagonal weights.
    pub fn lqr(&self, q_diag: &[f64; STATE_DIM], r_diag: &[f64; INPUT_DIM]) -> Result<GainMatrix> {
        let q = DMatrix::from_diagonal(&DVector::from_column_slice(q_diag));
        let r = DMatrix::from_diagonal(&DVector::from_column_slice(r_diag));
        lqr_gain(&self.a_dynamic(), &self.b_dynamic(), &q, &r)
    }
}

/// `[B, AB, …, Aⁿ⁻¹B]`.
pub fn controllability_matrix(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let m = b.ncols();
    let mut c = DMatrix::zeros(n, n * m);
    let mut block = b.clone();
    for i in 0..n {
        c.view_mut((0, i * m), (n, m)).copy_from(&block);
        block = a * block;
    }
    c
}

/// Numerical rank of the controllability matrix: singular values above
/// [`RANK_TOLERANCE`] times the largest one.
pub fn controllability_rank(a: &DMatrix<f64>, b: &DMatrix<f64>) -> usize {
    numerical_rank(&controllability_matrix(a, b), RANK_TOLERANCE)
}

pub fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    let sv = m.clone().singular_values();
    let max = sv.iter().fold(0.0_f64, |a, &b| a.max(b));
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .complex_eigenvalues()
        .iter()
        .fold(0.0, |acc, c| acc.max(c.re.hypot(c.im)))
}

/// Induced ∞-norm (largest absolute row sum).
pub fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Discrete LQR gain and the Riccati solution behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct GainMatrix {
    /// Feedback gain, `u = K e`.
    pub k: DMatrix<f64>,
    /// Stabilizing solution of the discrete algebraic Riccati equation.
    pub p: DMatrix<f64>,
    /// `ρ(A + B K)`.
    pub closed_loop_spectral_radius: f64,
    pub iterations: usize,
}

impl GainMatrix {
    pub fn apply(&self, error: &DVector<f64>) -> DVector<f64> {
        &self.k * error
    }
}

fn check_square(m: &DMatrix<f64>, n: usize, what: &'static str) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch(what));
    }
    Ok(())
}

/// `(R + BᵀPB)⁻¹ BᵀPA`.
fn riccati_gain(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    r: &DMatrix<f64>,
    p: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let bt_p = b.transpose() * p;
    let s = r + &bt_p * b;
    let rhs = bt_p * a;
    match s.clone().cholesky() {
        Some(ch) => Ok(ch.solve(&rhs)),
        None => s.lu().solve(&rhs).ok_or(Error::SingularMatrix),
    }
}

/// Solves the discrete algebraic Riccati equation by iterating the Riccati
/// difference equation from `P₀ = Q`, and returns the stabilizing gain
/// `K = -(R + BᵀPB)⁻¹ BᵀPA`.
pub fn lqr_gain(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
) -> Result<GainMatrix> {
    let n = a.nrows();
    let m = b.ncols();
    check_square(a, n, "A must be square")?;
    if b.nrows() != n {
        return Err(Error::DimensionMismatch("B must have as many rows as A"));
    }
    check_square(q, n, "Q must match A")?;
    check_square(r, m, "R must match the columns of B")?;
    if r.clone().cholesky().is_none() {
        return Err(Error::InvalidConfig("R must be positive definite"));
    }
    let q_min = q.clone().symmetric_eigenvalues().min();
    if q_min < -1e-12 * inf_norm(q).max(1.0) {
        return Err(Error::InvalidConfig("Q must be positive semidefinite"));
    }

    let at = a.transpose();
    let mut p = q.clone();
    let mut iterations = 0;
    loop {
        if iterations >= RICCATI_MAX_ITERATIONS {
            return Err(Error::RiccatiDivergence { iterations });
        }
        iterations += 1;
        let x = riccati_gain(a, b, r, &p)?;
        let pa = &p * a;
        let mut next = &at * &pa - (&at * &p * b) * x + q;
        next = (&next + next.transpose()) * 0.5;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::RiccatiDivergence { iterations });
        }
        let change = inf_norm(&(&next - &p));
        let scale = inf_norm(&p);
        p = next;
        if change <= RICCATI_TOLERANCE * scale {
            break;
        }
    }

    let k = -riccati_gain(a, b, r, &p)?;
    let rho = spectral_radius(&(a + b * &k));
    if !(rho < 1.0) {
        return Err(Error::NotStabilizable {
            spectral_radius: rho,
        });
    }
    Ok(GainMatrix {
        k,
        p,
        closed_loop_spectral_radius: rho,
        iterations,
    })
}

/// Relative residual `‖AᵀPA - AᵀPB(R+BᵀPB)⁻¹BᵀPA + Q - P‖∞ / ‖P‖∞`.
pub fn dare_residual(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
    p: &DMatrix<f64>,
) -> Result<f64> {
    let x = riccati_gain(a, b, r, p)?;
    let at = a.transpose();
    let rhs = &at * p * a - (&at * p * b) * x + q;
    Ok(inf_norm(&(rhs - p)) / inf_norm(p))
}

/// Strike command produced by the feedback law, after saturation.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Actuation {
    /// `U* + K e` before saturation.
    pub unsaturated: ControlInput,
    /// Command with `I ≥ 0` and `r ∈ [0, ℓ/2]`.
    pub input: ControlInput,
    pub impulse_saturated: bool,
    pub offset_saturated: bool,
}

/// `U = U* + K (Ȳ - Ȳ*)`, clamped to the admissible strike set.
pub fn feedback(
    y: &SectionStateJuggler,
    fp: &FixedPoint,
    gain: &GainMatrix,
    params: &StickParams,
) -> Actuation {
    let e = y.to_vector() - fp.y_star.to_vector();
    let du = gain.apply(&DVector::from_column_slice(e.as_slice()));
    let u0 = fp.u_star;
    let unsaturated = ControlInput::new(u0.impulse + du[0], u0.offset + du[1], u0.phi + du[2]);
    let impulse = unsaturated.impulse.max(0.0);
    let offset = unsaturated.offset.clamp(0.0, params.half_length());
    Actuation {
        unsaturated,
        input: ControlInput::new(impulse, offset, unsaturated.phi),
        impulse_saturated: impulse != unsaturated.impulse,
        offset_saturated: offset != unsaturated.offset,
    }
}
