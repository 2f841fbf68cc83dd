//! The semi-implicit scheme contracts for every step size.
//!
//! Sweeps `α` over four orders of magnitude on a quadratic, where the
//! proximal map is a linear solve, and reports the worst contraction slack.
//!
//! ```text
//! cargo run --example semi_implicit
//! ```

use hnag::diagnostics::{check_certificates, RateEnvelope};
use hnag::objectives::{random_quadratic, Vector};
use hnag::solvers::{run, Problem, SolverParams, Variant};

fn main() -> hnag::Result<()> {
    for mu in [0.0, 1.0] {
        let f = random_quadratic(10, mu, 1e3, 3)?;
        let x0 = Vector::from_element(10, 2.0);
        println!("μ = {mu}");
        for alpha in [0.1, 1.0, 10.0, 100.0, 1000.0] {
            let params = SolverParams::new(Variant::SemiImplicit, 1.0, mu, 1e3)
                .with_alpha(alpha)
                .with_max_iter(100);
            let (_, trace) = run(&x0, &x0, Problem::Proximal(&f), &params)?;
            let report = check_certificates(&trace, &RateEnvelope::for_params(&params));
            let c = report.check("contraction").expect("always checked");
            println!(
                "  α = {alpha:>7}: {:>3} steps, L_end = {:.3e}, worst slack {:+.2e} ({})",
                trace.n_iters(),
                trace.last().unwrap().lyapunov,
                c.worst_slack,
                if report.passed() {
                    "certified"
                } else {
                    "violated"
                }
            );
        }
    }
    Ok(())
}
