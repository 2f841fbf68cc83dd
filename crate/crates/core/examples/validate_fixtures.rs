//! The oracle validation battery.
//!
//! Checks gradients against finite differences and the `μ`/`L` sandwich on
//! every built-in fixture, then shows a quadratic with an understated `L`
//! being caught.
//!
//! ```text
//! cargo run --example validate_fixtures
//! ```

use hnag::objectives::{random_lasso, random_logistic, random_quadratic, validate_objective};

fn main() -> hnag::Result<()> {
    let quadratic = random_quadratic(10, 1.0, 100.0, 1)?;
    let logistic = random_logistic(60, 6, 0.01, 2)?;
    let lasso = random_lasso(20, 10, 0.5, 3)?;
    let fixtures: [(&str, &dyn hnag::objectives::SmoothObjective); 3] = [
        ("quadratic", &quadratic),
        ("logistic", &logistic),
        ("lasso (smooth part)", lasso.smooth()),
    ];
    for (name, f) in fixtures {
        let r = validate_objective(f, 100, 0);
        println!(
            "{name:<20} worst violation {:.2e} -> {}",
            r.worst_violation(),
            verdict(r.passed())
        );
    }

    let misdeclared = quadratic.with_constants(50.0, 1.0)?;
    let r = validate_objective(&misdeclared, 100, 0);
    println!(
        "{:<20} upper-bound violation {:.2e} -> {}",
        "quadratic, L = 50",
        r.upper_bound_violation,
        verdict(r.passed())
    );
    Ok(())
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}
