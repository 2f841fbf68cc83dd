//! Every smooth variant on ridge-regularized logistic regression.
//!
//! Prints iterations to a fixed Lyapunov tolerance and writes one
//! certificate report as JSON.
//!
//! ```text
//! cargo run --example logistic_regression
//! ```

use hnag::diagnostics::{check_certificates, RateEnvelope};
use hnag::objectives::{random_logistic, SmoothObjective, Vector};
use hnag::solvers::{run, Problem, SolverParams, Variant};

fn main() -> hnag::Result<()> {
    let f = random_logistic(200, 8, 0.05, 17)?;
    let (mu, l) = (f.strong_convexity(), f.lipschitz());
    println!("logistic: μ = {mu:.3}, L = {l:.3}");
    let x0 = Vector::zeros(8);

    let mut last_report = None;
    for variant in [
        Variant::Explicit,
        Variant::ExtraGradient,
        Variant::NagFlowA,
        Variant::NagFlowB,
    ] {
        let params = SolverParams::new(variant, mu, mu, l)
            .with_max_iter(5000)
            .with_gap_tol(1e-12);
        let (state, trace) = run(&x0, &x0, Problem::Smooth(&f), &params)?;
        let report = check_certificates(
            &trace.with_fixture("logistic"),
            &RateEnvelope::for_params(&params),
        );
        println!(
            "{variant:<15} {:>5} steps, certificates {}",
            state.k,
            if report.passed() { "pass" } else { "FAIL" }
        );
        last_report = Some(report);
    }
    println!("{}", serde_json::to_string_pretty(&last_report.unwrap())?);
    Ok(())
}
