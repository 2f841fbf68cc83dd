use std::sync::Arc;

use hnag::flow::{
    integrate_flow, integrate_flow_with, vector_field, verify_continuous_decay, BetaSchedule,
    FlowParams, FlowState, IntegratorOptions,
};
use hnag::objectives::{random_logistic, random_quadratic, Quadratic, SmoothObjective, Vector};
use nalgebra::{dvector, DMatrix};

/// `exp(M)` by scaling and squaring a truncated Taylor series.
fn expm(m: &DMatrix<f64>) -> DMatrix<f64> {
    let norm = m.abs().row_sum().max();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let a = m / 2f64.powi(squarings);
    let n = m.nrows();
    let mut term = DMatrix::identity(n, n);
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &a / k as f64;
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

#[test]
fn scalar_linear_flow_matches_closed_form() {
    let f = Quadratic::new(DMatrix::identity(1, 1), dvector![0.0]).unwrap();
    let params = FlowParams::new(&f, 1.0, BetaSchedule::Constant(0.0)).unwrap();
    let tol = 1e-9;
    let (x0, v0) = (1.5, -2.0);
    let s0 = FlowState::new(dvector![x0], dvector![v0], 1.0).unwrap();
    let traj = integrate_flow(&s0, &params, 6.0, tol).unwrap();
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let e = (-t).exp();
        assert!((s.v[0] - v0 * e).abs() <= 10.0 * tol, "v at t = {t}");
        assert!(
            (s.x[0] - (x0 + v0 * t) * e).abs() <= 10.0 * tol,
            "x at t = {t}"
        );
        assert_eq!(s.gamma, 1.0);
    }
}

#[test]
fn quadratic_flow_matches_matrix_exponential() {
    // With γ0 = μ the flow is linear in (x − x*, v − x*).
    let (n, mu, l) = (4, 0.5, 8.0);
    let f = random_quadratic(n, mu, l, 11).unwrap();
    let xs = f.minimizer().unwrap().clone();
    let beta = 0.2;
    let q = f.matrix().clone();
    let id = DMatrix::<f64>::identity(n, n);
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&(-&id - &q * beta));
    m.view_mut((0, n), (n, n)).copy_from(&id);
    m.view_mut((n, 0), (n, n))
        .copy_from(&((&id * mu - &q) / mu));
    m.view_mut((n, n), (n, n)).copy_from(&(-&id));

    let x0 = &xs + Vector::from_fn(n, |i, _| 1.0 - 0.5 * i as f64);
    let v0 = &xs + Vector::from_fn(n, |i, _| (i as f64).sin());
    let params = FlowParams::new(&f, mu, BetaSchedule::Constant(beta)).unwrap();
    let tol = 1e-10;
    let traj = integrate_flow(
        &FlowState::new(x0.clone(), v0.clone(), mu).unwrap(),
        &params,
        4.0,
        tol,
    )
    .unwrap();
    let mut z0 = Vector::zeros(2 * n);
    z0.rows_mut(0, n).copy_from(&(&x0 - &xs));
    z0.rows_mut(n, n).copy_from(&(&v0 - &xs));
    for (t, s) in traj.times.iter().zip(&traj.states).step_by(50) {
        let z = expm(&(&m * *t)) * &z0;
        let dx = (&s.x - &xs - z.rows(0, n)).amax();
        let dv = (&s.v - &xs - z.rows(n, n)).amax();
        assert!(dx.max(dv) < 1e3 * tol, "t = {t}: {dx:e} {dv:e}");
    }
}

#[test]
fn trajectory_satisfies_second_order_form() {
    // Eliminating v gives
    // γx'' + (γ + μ)x' + γβ∇²f x' + (γβ' + μβ + 1)∇f = 0.
    let f = Quadratic::new(
        DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 1.0, 2.0]),
        dvector![1.0, -1.0],
    )
    .unwrap();
    let mu = 1.0;
    let beta = |t: f64| 0.5 + 0.25 * (-t).exp();
    let dbeta = |t: f64| -0.25 * (-t).exp();
    let params = FlowParams::new(&f, mu, BetaSchedule::Custom(Arc::new(beta))).unwrap();
    let s0 = FlowState::new(dvector![2.0, 0.0], dvector![-1.0, 1.0], 4.0).unwrap();
    let opts = IntegratorOptions {
        samples: 2001,
        ..Default::default()
    };
    let traj = integrate_flow_with(&s0, &params, 2.0, 1e-11, &opts).unwrap();
    let h = traj.times[1] - traj.times[0];
    for i in (10..traj.len() - 10).step_by(97) {
        let t = traj.times[i];
        let field = |j: usize| {
            vector_field(&traj.states[j], &params, traj.times[j])
                .unwrap()
                .dx
        };
        let x = &traj.states[i].x;
        let d1 = field(i);
        let d2 = (field(i - 2) - field(i + 2) + (field(i + 1) - field(i - 1)) * 8.0) / (12.0 * h);
        let g = traj.states[i].gamma;
        let residual = &d2 * g
            + &d1 * (g + mu)
            + f.hessian_apply(&d1) * (g * beta(t))
            + f.gradient(x) * (g * dbeta(t) + mu * beta(t) + 1.0);
        assert!(residual.amax() < 1e-7, "t = {t}: {residual}");
    }
}

#[test]
fn decay_certificate_holds_in_the_tight_case() {
    // f = ½x² with μ = 1: the strong-convexity bound is an equality.
    let f = Quadratic::new(DMatrix::identity(1, 1), dvector![0.0]).unwrap();
    for beta in [0.0, 1.0] {
        let params = FlowParams::new(&f, 1.0, BetaSchedule::Constant(beta)).unwrap();
        let s0 = FlowState::new(dvector![1.0], dvector![-3.0], 1.0).unwrap();
        let traj = integrate_flow(&s0, &params, 5.0, 1e-8).unwrap();
        let report = verify_continuous_decay(&traj, &params).unwrap();
        assert!(report.passed(), "{report:#?}");
    }
}

#[test]
fn decay_certificate_on_generated_problems() {
    let quad = random_quadratic(5, 0.1, 10.0, 3).unwrap();
    let logi = random_logistic(40, 4, 0.05, 5).unwrap();
    let problems: [&dyn SmoothObjective; 2] = [&quad, &logi];
    for f in problems {
        let n = f.dim();
        let (mu, lip) = (f.strong_convexity(), f.lipschitz());
        for gamma0 in [mu, 1.0, 10.0 * lip] {
            let params =
                FlowParams::new(f, mu, BetaSchedule::matching_explicit_scheme(lip, gamma0))
                    .unwrap();
            let x0 = Vector::from_fn(n, |i, _| 1.0 + i as f64);
            let s0 = FlowState::new(x0, Vector::zeros(n), gamma0).unwrap();
            let traj = integrate_flow(&s0, &params, 5.0, 1e-8).unwrap();
            let report = verify_continuous_decay(&traj, &params).unwrap();
            assert!(report.passed(), "γ0 = {gamma0}: {report:#?}");
            assert!(
                report.final_lyapunov <= (-5f64).exp() * report.initial_lyapunov * (1.0 + 1e-6)
            );
        }
    }
}

#[test]
fn gamma_with_zero_mu_tracks_exponential() {
    let f = Quadratic::new(
        DMatrix::from_diagonal(&dvector![0.0, 1.0]),
        dvector![0.0, 0.0],
    )
    .unwrap();
    let params = FlowParams::new(&f, 0.0, BetaSchedule::Constant(0.5)).unwrap();
    let s0 = FlowState::new(dvector![1.0, 1.0], dvector![0.0, 2.0], 2.0).unwrap();
    let traj = integrate_flow(&s0, &params, 5.0, 1e-8).unwrap();
    let report = verify_continuous_decay(&traj, &params).unwrap();
    assert!(report.passed(), "{report:#?}");
    assert!(traj.states.windows(2).all(|w| w[1].gamma < w[0].gamma));
}
