use super::{Problem, SolverParams, SolverState, Variant};
use crate::error::{Error, Result};
use crate::objectives::{Composite, Proximable, SmoothObjective, Vector};

/// `(α_k, β_k)` for `variant` at damping `γ_k`.
pub fn step_sizes(variant: Variant, gamma: f64, params: &SolverParams) -> Result<(f64, f64)> {
    let l = params.lipschitz;
    let (alpha, beta) = match variant {
        Variant::Explicit | Variant::CompositeSplit => {
            let a = (gamma / l).sqrt();
            (a, 1.0 / (l * a))
        }
        Variant::CompositeAlt => {
            let a = (gamma / (4.0 * l)).sqrt();
            (a, 1.0 / (2.0 * l * a))
        }
        Variant::ExtraGradient => {
            // Positive root of Lα² − γα − 2γ = 0.
            let a = (gamma + (gamma * gamma + 8.0 * l * gamma).sqrt()) / (2.0 * l);
            (a, 1.0 / (l * a))
        }
        Variant::GradientMapping | Variant::NagFlowA => {
            // Positive root of Lα² − γα − γ = 0.
            let a = (gamma + (gamma * gamma + 4.0 * l * gamma).sqrt()) / (2.0 * l);
            (a, 1.0 / (l * a))
        }
        Variant::NagFlowB => {
            let a = nag_flow_b_alpha(gamma, params.mu, l)?;
            (a, 1.0 / (l * a))
        }
        Variant::SemiImplicit => {
            let a = params.alpha_override.ok_or(Error::MissingParameter {
                variant: "semi_implicit",
                what: "a step size (alpha)",
            })?;
            (a, a / gamma)
        }
    };
    if alpha > 0.0 && alpha.is_finite() && beta.is_finite() {
        Ok((alpha, beta))
    } else {
        Err(Error::NoPositiveRoot {
            gamma,
            mu: params.mu,
            lipschitz: l,
        })
    }
}

/// Positive root of `Lα² − (μ − γ)α − γ = 0`, computed without cancellation.
fn nag_flow_b_alpha(gamma: f64, mu: f64, l: f64) -> Result<f64> {
    let b = mu - gamma;
    let disc = b * b + 4.0 * l * gamma;
    let root = disc.sqrt();
    let alpha = if b >= 0.0 {
        (b + root) / (2.0 * l)
    } else {
        2.0 * gamma / (root - b)
    };
    if alpha > 0.0 && alpha.is_finite() {
        Ok(alpha)
    } else {
        Err(Error::NoPositiveRoot {
            gamma,
            mu,
            lipschitz: l,
        })
    }
}

fn next_gamma(gamma: f64, mu: f64, alpha: f64) -> f64 {
    (gamma + mu * alpha) / (1.0 + alpha)
}

/// `[γ v + μα x⁺ − α d] / (γ + μα)`.
fn velocity_update(
    state: &SolverState,
    mu: f64,
    alpha: f64,
    anchor: &Vector,
    direction: &Vector,
) -> Vector {
    let gamma = state.gamma;
    &state.v + ((anchor - &state.v) * (mu * alpha) - direction * alpha) / (gamma + mu * alpha)
}

/// `[x + α v − c d]/(1 + α)`, written as an increment of `x`.
fn averaged(state: &SolverState, alpha: f64, scaled: Option<(f64, &Vector)>) -> Vector {
    let mut delta = (&state.v - &state.x) * alpha;
    if let Some((c, d)) = scaled {
        delta -= d * c;
    }
    &state.x + delta / (1.0 + alpha)
}

fn advance(
    state: &SolverState,
    x: Vector,
    v: Vector,
    gamma: f64,
    grad: Option<Vector>,
    subgradient: Option<Vector>,
    (alpha, beta): (f64, f64),
) -> SolverState {
    SolverState {
        x,
        v,
        gamma,
        k: state.k + 1,
        last_grad: grad,
        subgradient,
        last_alpha: Some(alpha),
        last_beta: Some(beta),
    }
}

/// One step of the explicit scheme. Reuses `state.last_grad` as `∇f(x_k)`
/// and caches `∇f(x_{k+1})`, so a step costs one gradient.
pub fn step_explicit(
    state: &SolverState,
    obj: &dyn SmoothObjective,
    params: &SolverParams,
) -> Result<SolverState> {
    let (alpha, beta) = step_sizes(Variant::Explicit, state.gamma, params)?;
    let grad = state
        .last_grad
        .clone()
        .unwrap_or_else(|| obj.gradient(&state.x));
    let x = averaged(state, alpha, Some((alpha * beta, &grad)));
    let grad_next = obj.gradient(&x);
    let v = velocity_update(state, params.mu, alpha, &x, &grad_next);
    let gamma = next_gamma(state.gamma, params.mu, alpha);
    Ok(advance(
        state,
        x,
        v,
        gamma,
        Some(grad_next),
        None,
        (alpha, beta),
    ))
}

/// Explicit predictor `y_k` followed by the gradient step
/// `x_{k+1} = y_k − ∇f(y_k)/L`. Two gradients per step.
pub fn step_extra_gradient(
    state: &SolverState,
    obj: &dyn SmoothObjective,
    params: &SolverParams,
) -> Result<SolverState> {
    let (alpha, beta) = step_sizes(Variant::ExtraGradient, state.gamma, params)?;
    let grad = state
        .last_grad
        .clone()
        .unwrap_or_else(|| obj.gradient(&state.x));
    let y = averaged(state, alpha, Some((alpha * beta, &grad)));
    let grad_y = obj.gradient(&y);
    let v = velocity_update(state, params.mu, alpha, &y, &grad_y);
    let x = &y - &grad_y / params.lipschitz;
    let gamma = next_gamma(state.gamma, params.mu, alpha);
    Ok(advance(state, x, v, gamma, None, None, (alpha, beta)))
}

/// Semi-implicit step with `x_{k+1} = prox_{s f}(y_k)`; any `α > 0` is
/// admissible. Stores `p_{k+1} ∈ ∂f(x_{k+1})` in the new state.
pub fn step_semi_implicit(
    state: &SolverState,
    obj: &dyn Proximable,
    params: &SolverParams,
) -> Result<SolverState> {
    let (alpha, beta) = step_sizes(Variant::SemiImplicit, state.gamma, params)?;
    let y = averaged(state, alpha, None);
    let s = alpha * beta / (1.0 + alpha);
    let x = obj.prox(&y, s);
    let p = (&state.v - &x - (&x - &state.x) / alpha) / beta;
    let v = velocity_update(state, params.mu, alpha, &x, &p);
    let gamma = next_gamma(state.gamma, params.mu, alpha);
    Ok(advance(state, x, v, gamma, None, Some(p), (alpha, beta)))
}

fn split_step(
    variant: Variant,
    state: &SolverState,
    comp: &Composite,
    params: &SolverParams,
) -> Result<SolverState> {
    let (alpha, beta) = step_sizes(variant, state.gamma, params)?;
    let h = comp.smooth();
    let grad = state
        .last_grad
        .clone()
        .unwrap_or_else(|| h.gradient(&state.x));
    let z = averaged(state, alpha, Some((alpha * beta, &grad)));
    let s = alpha * beta / (1.0 + alpha);
    let x = comp.nonsmooth().prox(&z, s);
    let p = (&z - &x) / s;
    let grad_next = h.gradient(&x);
    let v = velocity_update(state, params.mu, alpha, &x, &(&grad_next + &p));
    let gamma = next_gamma(state.gamma, params.mu, alpha);
    Ok(advance(
        state,
        x,
        v,
        gamma,
        Some(grad_next),
        Some(p),
        (alpha, beta),
    ))
}

/// Forward step on `h`, proximal step on `g`. Stores `∇h(x_{k+1})` and
/// `p_{k+1} ∈ ∂g(x_{k+1})`.
pub fn step_composite_split(
    state: &SolverState,
    comp: &Composite,
    params: &SolverParams,
) -> Result<SolverState> {
    split_step(Variant::CompositeSplit, state, comp, params)
}

/// [`step_composite_split`] with `α = √(γ/(4L))`, `β = 1/(2Lα)`, which also
/// controls the sub-gradients `q_{k+1} = ∇h(x_{k+1}) + p_{k+1}`.
pub fn step_composite_alt(
    state: &SolverState,
    comp: &Composite,
    params: &SolverParams,
) -> Result<SolverState> {
    split_step(Variant::CompositeAlt, state, comp, params)
}

fn nag_flow_step(
    variant: Variant,
    state: &SolverState,
    surrogate: impl Fn(&Vector) -> Vector,
    params: &SolverParams,
) -> Result<SolverState> {
    let (alpha, beta) = step_sizes(variant, state.gamma, params)?;
    let y = averaged(state, alpha, None);
    let g = surrogate(&y);
    let v = velocity_update(state, params.mu, alpha, &y, &g);
    let x = &y - &g / params.lipschitz;
    let gamma = next_gamma(state.gamma, params.mu, alpha);
    Ok(advance(state, x, v, gamma, None, None, (alpha, beta)))
}

/// Accelerated gradient-mapping scheme:
///
/// ```text
/// y_k     = (x_k + α_k v_k)/(1 + α_k)
/// v_{k+1} = [γ_k v_k + μα_k y_k − α_k ĝ(y_k)]/(γ_k + μα_k)
/// x_{k+1} = y_k − ĝ(y_k)/L
/// ```
///
/// with `ĝ` the gradient mapping and `Lα_k² = γ_k(1 + α_k)`.
pub fn step_gradient_mapping(
    state: &SolverState,
    comp: &Composite,
    params: &SolverParams,
) -> Result<SolverState> {
    nag_flow_step(
        Variant::GradientMapping,
        state,
        |y| comp.gradient_mapping(y),
        params,
    )
}

/// [`step_gradient_mapping`] on a smooth objective (`ĝ = ∇f`).
pub fn step_nag_flow_a(
    state: &SolverState,
    obj: &dyn SmoothObjective,
    params: &SolverParams,
) -> Result<SolverState> {
    nag_flow_step(Variant::NagFlowA, state, |y| obj.gradient(y), params)
}

/// The gradient-mapping scheme written on the shifted sequence
/// `x̃_{k+1} = y_k`:
///
/// ```text
/// x̃_{k+1} = [x̃_k + α_k v_k − α_kβ_k ĝ(x̃_k)]/(1 + α_k)
/// v_{k+1} = [γ_k v_k + μα_k x̃_{k+1} − α_k ĝ(x̃_{k+1})]/(γ_k + μα_k)
/// ```
///
/// Started from `x̃_0`, it reproduces [`step_gradient_mapping`] started from
/// `x_0 = x̃_0 − ĝ(x̃_0)/L`, with `x̃_{k+1} = y_k`. Kept as a cross-check.
pub fn step_gradient_mapping_shifted(
    state: &SolverState,
    comp: &Composite,
    params: &SolverParams,
) -> Result<SolverState> {
    let (alpha, beta) = step_sizes(Variant::GradientMapping, state.gamma, params)?;
    let g = state
        .last_grad
        .clone()
        .unwrap_or_else(|| comp.gradient_mapping(&state.x));
    let x = averaged(state, alpha, Some((alpha * beta, &g)));
    let g_next = comp.gradient_mapping(&x);
    let v = velocity_update(state, params.mu, alpha, &x, &g_next);
    let gamma = next_gamma(state.gamma, params.mu, alpha);
    Ok(advance(
        state,
        x,
        v,
        gamma,
        Some(g_next),
        None,
        (alpha, beta),
    ))
}

/// Nesterov-type scheme with `Lα_k² = γ_{k+1}` and
/// `γ_{k+1} = γ_k + α_k(μ − γ_k)`. Requires `μ ≤ L`, which keeps `α_k ≤ 1`.
pub fn step_nag_flow_b(
    state: &SolverState,
    obj: &dyn SmoothObjective,
    params: &SolverParams,
) -> Result<SolverState> {
    let (alpha, beta) = step_sizes(Variant::NagFlowB, state.gamma, params)?;
    let (gamma, mu) = (state.gamma, params.mu);
    let gamma_next = gamma + alpha * (mu - gamma);
    let y = &state.x + (&state.v - &state.x) * (alpha * gamma / (gamma_next + alpha * gamma));
    let g = obj.gradient(&y);
    let v = &state.v + ((&y - &state.v) * mu - &g) * (alpha / gamma_next);
    let x = &y - &g / params.lipschitz;
    Ok(advance(state, x, v, gamma_next, None, None, (alpha, beta)))
}

/// Dispatches on `params.variant` after checking the pairing with `problem`.
pub fn step(
    state: &SolverState,
    problem: Problem<'_>,
    params: &SolverParams,
) -> Result<SolverState> {
    problem.require(params.variant)?;
    match (params.variant, problem) {
        (Variant::Explicit, Problem::Smooth(f)) => step_explicit(state, f, params),
        (Variant::ExtraGradient, Problem::Smooth(f)) => step_extra_gradient(state, f, params),
        (Variant::NagFlowA, Problem::Smooth(f)) => step_nag_flow_a(state, f, params),
        (Variant::NagFlowB, Problem::Smooth(f)) => step_nag_flow_b(state, f, params),
        (Variant::SemiImplicit, Problem::Proximal(f)) => step_semi_implicit(state, f, params),
        (Variant::CompositeSplit, Problem::Composite(c)) => step_composite_split(state, c, params),
        (Variant::CompositeAlt, Problem::Composite(c)) => step_composite_alt(state, c, params),
        (Variant::GradientMapping, Problem::Composite(c)) => {
            step_gradient_mapping(state, c, params)
        }
        _ => unreachable!("pairing checked by require"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{L1Norm, LeastSquares, PureNonsmooth, Quadratic, Zero};
    use crate::solvers::ProblemKind;
    use approx::assert_relative_eq;
    use nalgebra::{dvector, DMatrix};
    use std::sync::Arc;

    fn half_square() -> Quadratic {
        Quadratic::new(DMatrix::identity(1, 1), dvector![0.0]).unwrap()
    }

    fn start(x: f64, v: f64, gamma: f64) -> SolverState {
        SolverState::new(dvector![x], dvector![v], gamma).unwrap()
    }

    fn lasso_1d(mu: f64) -> Composite {
        let h = LeastSquares::new(DMatrix::identity(1, 1), dvector![3.0]).unwrap();
        Composite::new(Arc::new(h), Arc::new(L1Norm::new(1.0).unwrap()), mu)
            .unwrap()
            .with_reference(dvector![2.0], 2.5)
            .unwrap()
    }

    #[test]
    fn explicit_hand_values() {
        let f = half_square();
        let params = SolverParams::new(Variant::Explicit, 1.0, 1.0, 1.0);
        let s1 = step_explicit(&start(1.0, 1.0, 1.0), &f, &params).unwrap();
        assert_eq!((s1.x[0], s1.v[0], s1.gamma), (0.5, 0.5, 1.0));
        assert_eq!((s1.last_alpha, s1.last_beta), (Some(1.0), Some(1.0)));
        assert_eq!(s1.last_grad, Some(dvector![0.5]));
        assert_eq!(s1.k, 1);

        let params = SolverParams::new(Variant::Explicit, 1.0, 0.0, 1.0);
        let s1 = step_explicit(&start(1.0, 1.0, 1.0), &f, &params).unwrap();
        assert_eq!(s1.gamma, 0.5);
    }

    #[test]
    fn extra_gradient_hand_values() {
        let f = half_square();
        let params = SolverParams::new(Variant::ExtraGradient, 1.0, 1.0, 1.0);
        assert_eq!(
            step_sizes(Variant::ExtraGradient, 1.0, &params).unwrap(),
            (2.0, 0.5)
        );
        let s1 = step_extra_gradient(&start(1.0, 1.0, 1.0), &f, &params).unwrap();
        assert_relative_eq!(s1.x[0], 0.0, epsilon = 1e-15);
        assert_relative_eq!(s1.v[0], 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn semi_implicit_hand_values() {
        let f = half_square();
        let params = SolverParams::new(Variant::SemiImplicit, 1.0, 0.0, 1.0).with_alpha(1.0);
        let s1 = step_semi_implicit(&start(1.0, 1.0, 1.0), &f, &params).unwrap();
        assert_relative_eq!(s1.x[0], 2.0 / 3.0, epsilon = 1e-15);

        let l1 = PureNonsmooth::new(Arc::new(L1Norm::new(1.0).unwrap()), 1, 0.0).unwrap();
        let s1 = step_semi_implicit(&start(3.0, 3.0, 1.0), &l1, &params).unwrap();
        assert_eq!(s1.x[0], 2.5);
        assert_eq!(s1.subgradient, Some(dvector![1.0]));
    }

    #[test]
    fn composite_split_hand_values() {
        let comp = lasso_1d(0.0);
        let params = SolverParams::new(Variant::CompositeSplit, 1.0, 0.0, 1.0);
        let s1 = step_composite_split(&start(0.0, 0.0, 1.0), &comp, &params).unwrap();
        assert_eq!(s1.x[0], 1.0);
        assert_eq!(s1.subgradient, Some(dvector![1.0]));
    }

    #[test]
    fn composite_alt_step_sizes() {
        let params = SolverParams::new(Variant::CompositeAlt, 4.0, 0.0, 1.0);
        assert_eq!(
            step_sizes(Variant::CompositeAlt, 4.0, &params).unwrap(),
            (1.0, 0.5)
        );
    }

    #[test]
    fn composite_alt_degenerate_split() {
        let f = half_square();
        let comp = Composite::smooth_only(Arc::new(f));
        let params = SolverParams::new(Variant::CompositeAlt, 1.0, 1.0, 1.0);
        let s1 = step_composite_alt(&start(1.0, -2.0, 1.0), &comp, &params).unwrap();
        let q = s1.last_grad.clone().unwrap() + s1.subgradient.clone().unwrap();
        assert!((q - comp.smooth().gradient(&s1.x)).amax() < 1e-15);
    }

    #[test]
    fn gradient_mapping_values() {
        let h = Quadratic::new(DMatrix::identity(1, 1), dvector![0.0]).unwrap();
        let comp = Composite::new(
            Arc::new(h.clone()),
            Arc::new(L1Norm::new(1.0).unwrap()),
            1.0,
        )
        .unwrap();
        assert_eq!(comp.gradient_mapping(&dvector![3.0]), dvector![3.0]);
        let smooth = Composite::new(Arc::new(h.clone()), Arc::new(Zero), 1.0).unwrap();
        assert_eq!(
            smooth.gradient_mapping(&dvector![3.0]),
            h.gradient(&dvector![3.0])
        );

        let params = SolverParams::new(Variant::GradientMapping, 1.0, 0.0, 1.0);
        let (alpha, _) = step_sizes(Variant::GradientMapping, 1.0, &params).unwrap();
        assert_relative_eq!(alpha, (1.0 + 5f64.sqrt()) / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn nag_flow_b_stationary_gamma() {
        let params = SolverParams::new(Variant::NagFlowB, 1.0, 1.0, 1.0);
        assert_eq!(step_sizes(Variant::NagFlowB, 1.0, &params).unwrap().0, 1.0);
        let f = half_square();
        let s1 = step_nag_flow_b(&start(1.0, 2.0, 1.0), &f, &params).unwrap();
        assert_eq!(s1.gamma, 1.0);
    }

    #[test]
    fn nag_flow_b_root_solves_relation() {
        for &(gamma, mu, l) in &[
            (1.0, 0.0, 1.0),
            (100.0, 0.5, 3.0),
            (1e-6, 1e-3, 10.0),
            (5.0, 5.0, 5.0),
        ] {
            let params = SolverParams::new(Variant::NagFlowB, gamma, mu, l);
            let (a, _) = step_sizes(Variant::NagFlowB, gamma, &params).unwrap();
            let residual = l * a * a - gamma - a * (mu - gamma);
            assert!(
                residual.abs() <= 1e-14 * (l * a * a).max(gamma),
                "{residual:e}"
            );
            assert!(a <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn every_variant_fixes_the_equilibrium() {
        let q = Quadratic::new(
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 4.0]),
            dvector![1.0, 4.0],
        )
        .unwrap();
        let xs = SmoothObjective::minimizer(&q).unwrap().clone();
        assert_eq!(xs, dvector![1.0, 1.0]);
        let comp = lasso_1d(1.0);
        for variant in Variant::ALL {
            let mut params = SolverParams::new(variant, 0.7, 1.0, 4.0);
            if variant == Variant::SemiImplicit {
                params = params.with_alpha(3.0);
            }
            let (problem, x_star): (Problem, Vector) = match variant.problem_kind() {
                ProblemKind::Smooth => (Problem::Smooth(&q), xs.clone()),
                ProblemKind::Proximal => (Problem::Proximal(&q), xs.clone()),
                ProblemKind::Composite => {
                    params.lipschitz = 1.0;
                    (Problem::Composite(&comp), dvector![2.0])
                }
            };
            let s0 = SolverState::new(x_star.clone(), x_star.clone(), 0.7).unwrap();
            let s1 = step(&s0, problem, &params).unwrap();
            if variant.problem_kind() == ProblemKind::Composite {
                // The soft threshold evaluates (x* + s) − s.
                let tol = 4.0 * f64::EPSILON * x_star.amax();
                assert!((&s1.x - &x_star).amax() <= tol, "{variant}");
                assert!((&s1.v - &x_star).amax() <= tol, "{variant}");
            } else {
                assert_eq!(s1.x, x_star, "{variant}");
                assert_eq!(s1.v, x_star, "{variant}");
            }
        }
    }

    #[test]
    fn dispatch_rejects_mismatched_problem() {
        let f = half_square();
        let params = SolverParams::new(Variant::CompositeSplit, 1.0, 0.0, 1.0);
        let s0 = start(1.0, 1.0, 1.0);
        assert!(matches!(
            step(&s0, Problem::Smooth(&f), &params),
            Err(Error::IncompatibleVariant { .. })
        ));
    }
}
