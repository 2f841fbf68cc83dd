//! Two classical identities.
//!
//! With `γ0 = μ` and `v0 = x0`, `nag_flow_b` is Nesterov's constant-momentum
//! method. The explicit scheme's positions satisfy a three-term recurrence
//! with the velocity eliminated.
//!
//! ```text
//! cargo run --example nesterov_equivalence
//! ```

use hnag::objectives::{random_quadratic, SmoothObjective, Vector};
use hnag::solvers::{
    step_explicit, step_nag_flow_b, three_term_x_recurrence, RecurrenceHistory, SolverParams,
    SolverState, Variant,
};

fn main() -> hnag::Result<()> {
    let (mu, l) = (0.5, 50.0);
    let f = random_quadratic(8, mu, l, 5)?;
    let x0 = Vector::from_fn(8, |i, _| (i as f64).sin() * 3.0);

    let momentum = (l.sqrt() - mu.sqrt()) / (l.sqrt() + mu.sqrt());
    let params = SolverParams::new(Variant::NagFlowB, mu, mu, l);
    let mut state = SolverState::new(x0.clone(), x0.clone(), mu)?;
    let (mut prev, mut curr) = (x0.clone(), x0.clone());
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let y = &curr + (&curr - &prev) * momentum;
        let next = &y - f.gradient(&y) / l;
        prev = std::mem::replace(&mut curr, next);
        state = step_nag_flow_b(&state, &f, &params)?;
        worst = worst.max((&state.x - &curr).amax());
    }
    println!("nag_flow_b vs Nesterov (momentum {momentum:.4}): max deviation {worst:.2e}");

    let params = SolverParams::new(Variant::Explicit, 1.0, mu, l);
    let mut states = vec![SolverState::new(x0.clone(), x0, 1.0)?];
    for _ in 0..51 {
        let next = step_explicit(states.last().unwrap(), &f, &params)?;
        states.push(next);
    }
    let mut worst: f64 = 0.0;
    for k in 1..=50 {
        let (gp, gc) = (f.gradient(&states[k - 1].x), f.gradient(&states[k].x));
        let history = RecurrenceHistory {
            k,
            x_prev: &states[k - 1].x,
            x_curr: &states[k].x,
            grad_prev: &gp,
            grad_curr: &gc,
            gamma_prev: states[k - 1].gamma,
        };
        let x = three_term_x_recurrence(&history, &params)?;
        worst = worst.max((&x - &states[k + 1].x).amax());
    }
    println!("three-term recurrence vs explicit scheme: max deviation {worst:.2e}");
    Ok(())
}
