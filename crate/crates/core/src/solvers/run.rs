use serde::{Deserialize, Serialize};

use super::{step, step_sizes, Problem, SolverParams, SolverState, Variant};
use crate::diagnostics::{lyapunov_discrete, RateEnvelope, Trace, TraceRecord};
use crate::error::{Error, Result};
use crate::objectives::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// Stationarity measure at or below `stop_grad_tol`.
    Stationary,
    /// Lyapunov value at or below `stop_gap_tol`.
    GapTolerance,
    MaxIter,
}

/// Iterates `params.variant` from `(x0, v0, γ0)` and records every iterate.
///
/// Before each step the run stops if the stationarity measure is at most
/// `stop_grad_tol`, if `L_k ≤ stop_gap_tol`, or after `max_iter` steps. A
/// zero gap tolerance stops only at `L_k = 0` exactly, so rounding below an
/// approximate reference value does not end a run. The problem must carry a
/// reference minimizer and optimal value.
pub fn run(
    x0: &Vector,
    v0: &Vector,
    problem: Problem<'_>,
    params: &SolverParams,
) -> Result<(SolverState, Trace)> {
    params.validate()?;
    problem.require(params.variant)?;
    let n = problem.dim();
    for len in [x0.len(), v0.len()] {
        if len != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: len,
            });
        }
    }
    let fs = problem.min_value().ok_or(Error::MissingMinimizer)?;
    problem.minimizer().ok_or(Error::MissingMinimizer)?;

    let variant = params.variant;
    let mut state = SolverState::new(x0.clone(), v0.clone(), params.gamma0)?;
    let mut records = Vec::new();
    let (mut lambda, mut residual) = (1.0, 0.0);

    let stop_reason = loop {
        let (alpha, beta) = step_sizes(variant, state.gamma, params)?;
        let (grad_norm_sq, stationarity) = row_measures(&state, problem, variant);
        let lyapunov = lyapunov_discrete(&state.x, &state.v, state.gamma, problem)?;
        records.push(TraceRecord {
            k: state.k,
            f_gap: problem.value(&state.x) - fs,
            grad_norm_sq,
            stationarity,
            gamma: state.gamma,
            alpha,
            beta,
            lyapunov,
            residual_sum: residual,
            lambda,
        });

        if stationarity <= params.stop_grad_tol {
            break StopReason::Stationary;
        }
        let gap_tol = params.stop_gap_tol;
        if lyapunov <= gap_tol && (gap_tol > 0.0 || lyapunov == 0.0) {
            break StopReason::GapTolerance;
        }
        if state.k >= params.max_iter {
            break StopReason::MaxIter;
        }

        let next = step(&state, problem, params)?;
        if !next.is_finite() {
            return Err(Error::Diverged { iteration: next.k });
        }
        let increment = match variant {
            Variant::Explicit | Variant::ExtraGradient => 0.5 * alpha * beta * grad_norm_sq,
            Variant::SemiImplicit => {
                let p = next.subgradient.as_ref().map_or(0.0, |p| p.norm_squared());
                0.5 * alpha * beta * p
            }
            _ => 0.0,
        };
        if variant == Variant::NagFlowB {
            lambda *= 1.0 - alpha;
        } else {
            residual = (residual + increment) / (1.0 + alpha);
            lambda /= 1.0 + alpha;
        }
        state = next;
    };

    let trace = Trace {
        variant,
        fixture: "custom".to_string(),
        lipschitz: params.lipschitz,
        mu: params.mu,
        gamma0: params.gamma0,
        envelope: RateEnvelope::for_params(params),
        stop_reason,
        records,
    };
    Ok((state, trace))
}

/// `(grad_norm_sq, stationarity)` for the current row.
fn row_measures(state: &SolverState, problem: Problem<'_>, variant: Variant) -> (f64, f64) {
    match problem {
        Problem::Smooth(f) => {
            let g = state
                .last_grad
                .clone()
                .unwrap_or_else(|| f.gradient(&state.x));
            let sq = g.norm_squared();
            (sq, sq.sqrt())
        }
        Problem::Composite(_) => {
            let s = problem.stationarity(&state.x);
            let sq = match (variant, &state.last_grad, &state.subgradient) {
                (Variant::CompositeSplit | Variant::CompositeAlt, Some(g), Some(p)) => {
                    (g + p).norm_squared()
                }
                _ => s * s,
            };
            (sq, s)
        }
        Problem::Proximal(_) => {
            let s = problem.stationarity(&state.x);
            let sq = state
                .subgradient
                .as_ref()
                .map_or(s * s, |p| p.norm_squared());
            (sq, s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{random_quadratic, SmoothObjective};

    #[test]
    fn start_at_minimizer_stops_immediately() {
        let f = random_quadratic(3, 1.0, 10.0, 1).unwrap();
        let xs = f.minimizer().unwrap().clone();
        let params = SolverParams::new(Variant::Explicit, 1.0, 1.0, 10.0);
        let (state, trace) = run(&xs, &xs, Problem::Smooth(&f), &params).unwrap();
        assert_eq!(state.k, 0);
        assert_eq!(trace.n_iters(), 0);
    }

    #[test]
    fn max_iter_and_k_increments() {
        let f = random_quadratic(3, 0.0, 1.0, 2).unwrap();
        let x0 = Vector::from_element(3, 1.0);
        let params = SolverParams::new(Variant::Explicit, 1.0, 0.0, 1.0).with_max_iter(25);
        let (state, trace) = run(&x0, &x0, Problem::Smooth(&f), &params).unwrap();
        assert_eq!(state.k, 25);
        assert_eq!(trace.stop_reason, StopReason::MaxIter);
        assert!(trace.records.iter().enumerate().all(|(i, r)| r.k == i));
    }

    #[test]
    fn divergence_reports_iteration() {
        // Declaring L far too small makes the explicit scheme blow up.
        let f = random_quadratic(2, 1.0, 1e3, 3).unwrap();
        let x0 = Vector::from_element(2, 1.0);
        let params = SolverParams::new(Variant::Explicit, 1.0, 1.0, 1e-3).with_max_iter(100_000);
        let err = run(&x0, &x0, Problem::Smooth(&f), &params).unwrap_err();
        assert!(
            matches!(err, Error::Diverged { iteration } if iteration > 0),
            "{err}"
        );
    }
}
