//! The continuous H-NAG system
//!
//! ```text
//! x' = v − x − β(t)∇f(x)
//! γ v' = μ(x − v) − ∇f(x)
//! γ' = μ − γ
//! ```
//!
//! with its Lyapunov function `L = f(x) − f(x*) + (γ/2)‖v − x*‖²`, which decays
//! at least like `e^{−t}` along every trajectory.

mod decay;
mod integrator;

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_nonnegative, Error, Result};
use crate::objectives::{SmoothObjective, Vector};

pub use decay::{verify_continuous_decay, DecayCheck, DecayReport};
pub use integrator::{DormandPrince, IntegrationStats, IntegratorOptions};

/// A point `(x, v, γ)` of the phase space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    pub x: Vector,
    pub v: Vector,
    pub gamma: f64,
}

impl FlowState {
    pub fn new(x: Vector, v: Vector, gamma: f64) -> Result<Self> {
        if x.len() != v.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                got: v.len(),
            });
        }
        if !(gamma > 0.0) {
            return Err(Error::NonPositive {
                name: "gamma",
                value: gamma,
            });
        }
        Ok(Self { x, v, gamma })
    }

    /// The equilibrium `(x*, x*, μ)`.
    pub fn equilibrium(minimizer: &Vector, mu: f64) -> Result<Self> {
        Self::new(minimizer.clone(), minimizer.clone(), mu)
    }

    fn pack(&self) -> Vector {
        let n = self.x.len();
        let mut y = Vector::zeros(2 * n + 1);
        y.rows_mut(0, n).copy_from(&self.x);
        y.rows_mut(n, n).copy_from(&self.v);
        y[2 * n] = self.gamma;
        y
    }

    fn unpack(y: &Vector) -> Self {
        let n = (y.len() - 1) / 2;
        Self {
            x: y.rows(0, n).into_owned(),
            v: y.rows(n, n).into_owned(),
            gamma: y[2 * n],
        }
    }
}

/// Hessian-damping coefficient `β(t) ≥ 0`.
#[derive(Clone)]
pub enum BetaSchedule {
    Constant(f64),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl BetaSchedule {
    /// `β ≡ 1/√(L γ0)`, matching the discrete choice `β_k = 1/(L α_k)` at
    /// `k = 0`.
    pub fn matching_explicit_scheme(lipschitz: f64, gamma0: f64) -> Self {
        BetaSchedule::Constant(1.0 / (lipschitz * gamma0).sqrt())
    }

    pub fn at(&self, t: f64) -> f64 {
        match self {
            BetaSchedule::Constant(b) => *b,
            BetaSchedule::Custom(f) => f(t),
        }
    }
}

impl fmt::Debug for BetaSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BetaSchedule::Constant(b) => f.debug_tuple("Constant").field(b).finish(),
            BetaSchedule::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FlowParams<'a> {
    pub mu: f64,
    pub beta: BetaSchedule,
    pub objective: &'a dyn SmoothObjective,
}

impl<'a> FlowParams<'a> {
    pub fn new(objective: &'a dyn SmoothObjective, mu: f64, beta: BetaSchedule) -> Result<Self> {
        ensure_nonnegative("mu", mu)?;
        Ok(Self {
            mu,
            beta,
            objective,
        })
    }

    fn beta_at(&self, t: f64) -> Result<f64> {
        let b = self.beta.at(t);
        ensure_nonnegative("beta(t)", b)?;
        Ok(b)
    }
}

/// Time derivative of a [`FlowState`].
#[derive(Debug, Clone, PartialEq)]
pub struct FlowDerivative {
    pub dx: Vector,
    pub dv: Vector,
    pub dgamma: f64,
}

pub fn vector_field(state: &FlowState, params: &FlowParams<'_>, t: f64) -> Result<FlowDerivative> {
    if !(state.gamma > 0.0) {
        return Err(Error::NonPositive {
            name: "gamma",
            value: state.gamma,
        });
    }
    let beta = params.beta_at(t)?;
    let grad = params.objective.gradient(&state.x);
    let dx = &state.v - &state.x - &grad * beta;
    let dv = ((&state.x - &state.v) * params.mu - grad) / state.gamma;
    Ok(FlowDerivative {
        dx,
        dv,
        dgamma: params.mu - state.gamma,
    })
}

/// `f(x) − f(x*) + (γ/2)‖v − x*‖²`.
pub fn lyapunov_continuous(state: &FlowState, objective: &dyn SmoothObjective) -> Result<f64> {
    let (xs, fs) = objective
        .minimizer()
        .zip(objective.min_value())
        .ok_or(Error::MissingMinimizer)?;
    Ok(objective.value(&state.x) - fs + 0.5 * state.gamma * (&state.v - xs).norm_squared())
}

/// Uniformly sampled solution of the flow.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<FlowState>,
    /// `J(t) = ∫₀ᵗ e^{s−t} [β‖∇f‖² + (μ/2)‖x − v‖²] ds` at each sample,
    /// integrated with the flow as `J' = −J + β‖∇f‖² + (μ/2)‖x − v‖²`.
    pub dissipation: Vec<f64>,
    pub tolerance: f64,
    pub stats: IntegrationStats,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &FlowState)> {
        self.times.last().copied().zip(self.states.last())
    }

    /// CSV with header `t,L,grad_norm,gamma`, floats printed with 17
    /// significant digits.
    pub fn write_csv<W: Write>(&self, objective: &dyn SmoothObjective, mut out: W) -> Result<()> {
        let io = |source| Error::Io {
            path: "flow.csv".into(),
            source,
        };
        writeln!(out, "t,L,grad_norm,gamma").map_err(io)?;
        for (t, s) in self.times.iter().zip(&self.states) {
            let l = lyapunov_continuous(s, objective)?;
            let g = objective.gradient(&s.x).norm();
            writeln!(out, "{t:.16e},{l:.16e},{g:.16e},{:.16e}", s.gamma).map_err(io)?;
        }
        Ok(())
    }
}

/// Integrates the flow on `[0, t_end]` with the default sampling (1001
/// uniform samples).
pub fn integrate_flow(
    initial: &FlowState,
    params: &FlowParams<'_>,
    t_end: f64,
    tol: f64,
) -> Result<Trajectory> {
    integrate_flow_with(initial, params, t_end, tol, &IntegratorOptions::default())
}

pub fn integrate_flow_with(
    initial: &FlowState,
    params: &FlowParams<'_>,
    t_end: f64,
    tol: f64,
    options: &IntegratorOptions,
) -> Result<Trajectory> {
    if !(tol > 1e-12 && tol < 1e-2) {
        return Err(Error::Config(format!(
            "integration tolerance {tol:e} must lie in (1e-12, 1e-2)"
        )));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::NonPositive {
            name: "t_end",
            value: t_end,
        });
    }
    if initial.x.len() != params.objective.dim() {
        return Err(Error::DimensionMismatch {
            expected: params.objective.dim(),
            got: initial.x.len(),
        });
    }
    if options.samples < 100 {
        return Err(Error::Config(format!(
            "at least 100 samples are required, got {}",
            options.samples
        )));
    }
    // Validate γ > 0 up front.
    FlowState::new(initial.x.clone(), initial.v.clone(), initial.gamma)?;

    let n = options.samples;
    let times: Vec<f64> = (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect();
    let m = initial.x.len();
    let rhs = |t: f64, y: &Vector| -> Result<Vector> {
        let state = FlowState::unpack(&y.rows(0, 2 * m + 1).into_owned());
        let beta = params.beta_at(t)?;
        let d = vector_field(&state, params, t)?;
        let grad_sq = params.objective.gradient(&state.x).norm_squared();
        let mut out = Vector::zeros(y.len());
        out.rows_mut(0, m).copy_from(&d.dx);
        out.rows_mut(m, m).copy_from(&d.dv);
        out[2 * m] = d.dgamma;
        out[2 * m + 1] =
            -y[2 * m + 1] + beta * grad_sq + 0.5 * params.mu * (&state.x - &state.v).norm_squared();
        Ok(out)
    };
    let packed = initial.pack();
    let y0 = Vector::from_iterator(2 * m + 2, packed.iter().copied().chain([0.0]));
    let solver = DormandPrince::new(tol, options.max_steps);
    let (samples, stats) = solver.solve(rhs, &y0, &times)?;
    Ok(Trajectory {
        times,
        states: samples
            .iter()
            .map(|y| FlowState::unpack(&y.rows(0, 2 * m + 1).into_owned()))
            .collect(),
        dissipation: samples.iter().map(|y| y[2 * m + 1]).collect(),
        tolerance: tol,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::Quadratic;
    use approx::assert_relative_eq;
    use nalgebra::{dvector, DMatrix};

    fn half_square() -> Quadratic {
        Quadratic::new(DMatrix::identity(1, 1), dvector![0.0]).unwrap()
    }

    #[test]
    fn equilibrium_is_stationary() {
        let f = Quadratic::new(
            DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]),
            dvector![1.0, -1.0],
        )
        .unwrap();
        let xs = f.minimizer().unwrap().clone();
        for beta in [0.0, 0.3, 10.0] {
            let params = FlowParams::new(&f, 0.7, BetaSchedule::Constant(beta)).unwrap();
            let d = vector_field(&FlowState::equilibrium(&xs, 0.7).unwrap(), &params, 0.0).unwrap();
            assert!(d.dx.amax() < 1e-13 && d.dv.amax() < 1e-13);
            assert_eq!(d.dgamma, 0.0);
        }
    }

    #[test]
    fn field_hand_values() {
        let f = half_square();
        let p = FlowParams::new(&f, 0.0, BetaSchedule::Constant(0.0)).unwrap();
        let s = FlowState::new(dvector![1.0], dvector![0.0], 1.0).unwrap();
        let d = vector_field(&s, &p, 0.0).unwrap();
        assert_eq!((d.dx[0], d.dv[0], d.dgamma), (-1.0, -1.0, -1.0));

        let p = FlowParams::new(&f, 1.0, BetaSchedule::Constant(1.0)).unwrap();
        let s = FlowState::new(dvector![1.0], dvector![1.0], 1.0).unwrap();
        let d = vector_field(&s, &p, 0.0).unwrap();
        assert_eq!((d.dx[0], d.dv[0], d.dgamma), (-1.0, -1.0, 0.0));
    }

    #[test]
    fn rejects_nonpositive_gamma() {
        let f = half_square();
        let p = FlowParams::new(&f, 0.0, BetaSchedule::Constant(0.0)).unwrap();
        let s = FlowState {
            x: dvector![1.0],
            v: dvector![0.0],
            gamma: 0.0,
        };
        assert!(vector_field(&s, &p, 0.0).is_err());
        assert!(FlowState::new(dvector![1.0], dvector![0.0], -1.0).is_err());
    }

    #[test]
    fn negative_beta_is_rejected_when_queried() {
        let f = half_square();
        let p = FlowParams::new(&f, 0.0, BetaSchedule::Custom(Arc::new(|t| 1.0 - t))).unwrap();
        let s = FlowState::new(dvector![1.0], dvector![0.0], 1.0).unwrap();
        assert!(vector_field(&s, &p, 0.5).is_ok());
        assert!(vector_field(&s, &p, 2.0).is_err());
    }

    #[test]
    fn lyapunov_values() {
        let f = half_square();
        let at_min = FlowState::new(dvector![0.0], dvector![0.0], 3.0).unwrap();
        assert_eq!(lyapunov_continuous(&at_min, &f).unwrap(), 0.0);

        let s = FlowState::new(dvector![1.0], dvector![1.0], 2.0).unwrap();
        let direct = lyapunov_continuous(&s, &f).unwrap();
        let alt = 0.5 * s.x[0] * s.x[0] + 0.5 * s.gamma * s.v.norm_squared();
        assert_eq!(direct, 1.5);
        assert_eq!(direct, alt);

        let v_at_min = FlowState::new(dvector![1.0], dvector![0.0], 1.0).unwrap();
        let doubled = FlowState::new(dvector![1.0], dvector![0.0], 2.0).unwrap();
        assert_eq!(
            lyapunov_continuous(&v_at_min, &f).unwrap(),
            lyapunov_continuous(&doubled, &f).unwrap()
        );
    }

    #[test]
    fn lyapunov_requires_minimizer() {
        let f = crate::objectives::Logistic::new(DMatrix::zeros(1, 1), dvector![1.0], 0.0).unwrap();
        let s = FlowState::new(dvector![1.0], dvector![0.0], 1.0).unwrap();
        assert!(matches!(
            lyapunov_continuous(&s, &f),
            Err(Error::MissingMinimizer)
        ));
    }

    #[test]
    fn equilibrium_trajectory_is_constant() {
        let f = half_square();
        let p = FlowParams::new(&f, 1.0, BetaSchedule::Constant(1.0)).unwrap();
        let s0 = FlowState::equilibrium(&dvector![0.0], 1.0).unwrap();
        let traj = integrate_flow(&s0, &p, 3.0, 1e-8).unwrap();
        assert!(traj.len() >= 100);
        assert!(traj.states.iter().all(|s| *s == s0));
    }

    #[test]
    fn gamma_alone_decays_exponentially() {
        let f = half_square();
        let p = FlowParams::new(&f, 0.0, BetaSchedule::Constant(0.0)).unwrap();
        let tol = 1e-9;
        let s0 = FlowState::new(dvector![0.0], dvector![0.0], 1.0).unwrap();
        let traj = integrate_flow(&s0, &p, 5.0, tol).unwrap();
        for (t, s) in traj.times.iter().zip(&traj.states) {
            assert!((s.gamma - (-t).exp()).abs() <= 10.0 * tol, "t = {t}");
        }
    }

    #[test]
    fn rejects_bad_tolerance_and_horizon() {
        let f = half_square();
        let p = FlowParams::new(&f, 0.0, BetaSchedule::Constant(0.0)).unwrap();
        let s0 = FlowState::new(dvector![1.0], dvector![0.0], 1.0).unwrap();
        assert!(integrate_flow(&s0, &p, 1.0, 1e-13).is_err());
        assert!(integrate_flow(&s0, &p, 1.0, 0.1).is_err());
        assert!(integrate_flow(&s0, &p, 0.0, 1e-6).is_err());
    }

    #[test]
    fn csv_header_and_rows() {
        let f = half_square();
        let p = FlowParams::new(&f, 1.0, BetaSchedule::Constant(0.5)).unwrap();
        let s0 = FlowState::new(dvector![1.0], dvector![-1.0], 1.0).unwrap();
        let traj = integrate_flow(&s0, &p, 1.0, 1e-8).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&f, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,L,grad_norm,gamma"));
        assert_eq!(lines.count(), traj.len());
        let first_l: f64 = text
            .lines()
            .nth(1)
            .unwrap()
            .split(',')
            .nth(1)
            .unwrap()
            .parse()
            .unwrap();
        assert_relative_eq!(first_l, 0.5 + 0.5 * 1.0 * 1.0, epsilon = 1e-15);
    }
}
