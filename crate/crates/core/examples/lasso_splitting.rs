//! Composite schemes on a lasso problem `½‖Ax − b‖² + w‖x‖₁`.
//!
//! Compares the forward-backward split, its sub-gradient-controlled variant
//! and the gradient-mapping scheme, and prints the recovered support.
//!
//! ```text
//! cargo run --example lasso_splitting
//! ```

use hnag::diagnostics::{check_certificates, RateEnvelope};
use hnag::objectives::{random_lasso, Vector};
use hnag::solvers::{run, Problem, SolverParams, Variant};

fn main() -> hnag::Result<()> {
    let lasso = random_lasso(40, 20, 0.5, 11)?;
    let l = lasso.lipschitz();
    let x0 = Vector::zeros(20);
    println!(
        "L = {l:.3}, reference f* = {:.6}",
        lasso.min_value().unwrap()
    );

    for variant in [
        Variant::CompositeSplit,
        Variant::CompositeAlt,
        Variant::GradientMapping,
    ] {
        let params = SolverParams::new(variant, 1.0, 0.0, l)
            .with_max_iter(2000)
            .with_grad_tol(1e-10);
        let (state, trace) = run(&x0, &x0, Problem::Composite(&lasso), &params)?;
        let report = check_certificates(&trace, &RateEnvelope::for_params(&params));
        let support: Vec<usize> = (0..20).filter(|&i| state.x[i] != 0.0).collect();
        println!(
            "{variant:<17} {:>5} steps, gap {:.2e}, certificates {}, support {support:?}",
            state.k,
            trace.last().unwrap().f_gap,
            if report.passed() { "pass" } else { "FAIL" }
        );
    }
    Ok(())
}
