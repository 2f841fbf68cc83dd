//! Explicit H-NAG scheme on an ill-conditioned quadratic.
//!
//! Runs 300 steps with μ = 1, L = 100 and prints the Lyapunov value next to
//! its certified envelope, then the certificate report.
//!
//! ```text
//! cargo run --example quadratic_explicit
//! ```

use hnag::diagnostics::{check_certificates, RateEnvelope};
use hnag::objectives::{random_quadratic, SmoothObjective, Vector};
use hnag::solvers::{run, Problem, SolverParams, Variant};

fn main() -> hnag::Result<()> {
    let f = random_quadratic(20, 1.0, 100.0, 42)?;
    let x0 = f.minimizer().expect("reference attached") + Vector::from_element(20, 1.0);
    let params = SolverParams::new(Variant::Explicit, 1.0, 1.0, 100.0).with_max_iter(300);

    let (state, trace) = run(&x0, &x0, Problem::Smooth(&f), &params)?;
    let l0 = trace.records[0].lyapunov;
    println!(
        "{:>5} {:>14} {:>14} {:>10}",
        "k", "L_k", "envelope·L_0", "γ_k"
    );
    for r in trace.records.iter().step_by(30) {
        println!(
            "{:>5} {:>14.6e} {:>14.6e} {:>10.4}",
            r.k,
            r.lyapunov,
            trace.envelope.value(r.k) * l0,
            r.gamma
        );
    }
    println!(
        "final f(x) - f* = {:.3e} after {} steps",
        trace.last().unwrap().f_gap,
        state.k
    );

    let report = check_certificates(&trace, &RateEnvelope::for_params(&params));
    for c in &report.checks {
        println!("{:<20} {}", c.name, if c.pass { "pass" } else { "FAIL" });
    }
    Ok(())
}
