use super::{step_sizes, SolverParams, Variant};
use crate::error::{Error, Result};
use crate::objectives::Vector;

/// Two consecutive explicit-scheme iterates and their gradients.
#[derive(Debug, Clone)]
pub struct RecurrenceHistory<'a> {
    /// Index of `x_curr`; must be at least 1.
    pub k: usize,
    pub x_prev: &'a Vector,
    pub x_curr: &'a Vector,
    pub grad_prev: &'a Vector,
    pub grad_curr: &'a Vector,
    /// `γ_{k−1}`; `γ_k` follows from the damping recurrence.
    pub gamma_prev: f64,
}

/// `x_{k+1}` of the explicit scheme with the velocity eliminated.
///
/// With `D_k = (x_{k+1} − x_k)/α_k`,
///
/// ```text
/// γ_k(1 + α_{k−1})(1 + α_k) D_k = γ_{k−1} D_{k−1}
///     − γ_{k−1}(β_k ∇f(x_k) − β_{k−1} ∇f(x_{k−1}))
///     − α_{k−1}(1 + μβ_k) ∇f(x_k)
/// ```
///
/// and `x_{k+1} = x_k + α_k D_k`.
pub fn three_term_x_recurrence(
    history: &RecurrenceHistory<'_>,
    params: &SolverParams,
) -> Result<Vector> {
    if history.k < 1 {
        return Err(Error::InsufficientHistory(history.k));
    }
    let mu = params.mu;
    let gamma_prev = history.gamma_prev;
    let (alpha_prev, beta_prev) = step_sizes(Variant::Explicit, gamma_prev, params)?;
    let gamma = (gamma_prev + mu * alpha_prev) / (1.0 + alpha_prev);
    let (alpha, beta) = step_sizes(Variant::Explicit, gamma, params)?;

    let d_prev = (history.x_curr - history.x_prev) / alpha_prev;
    let rhs = &d_prev * gamma_prev
        - (history.grad_curr * beta - history.grad_prev * beta_prev) * gamma_prev
        - history.grad_curr * (alpha_prev * (1.0 + mu * beta));
    let d = rhs / (gamma * (1.0 + alpha_prev) * (1.0 + alpha));
    Ok(history.x_curr + d * alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    #[test]
    fn rejects_k_zero() {
        let x = dvector![1.0];
        let h = RecurrenceHistory {
            k: 0,
            x_prev: &x,
            x_curr: &x,
            grad_prev: &x,
            grad_curr: &x,
            gamma_prev: 1.0,
        };
        let params = SolverParams::new(Variant::Explicit, 1.0, 0.0, 1.0);
        assert!(matches!(
            three_term_x_recurrence(&h, &params),
            Err(Error::InsufficientHistory(0))
        ));
    }

    #[test]
    fn constant_sequence_at_minimizer() {
        let xs = dvector![2.0, -1.0];
        let zero = dvector![0.0, 0.0];
        let h = RecurrenceHistory {
            k: 3,
            x_prev: &xs,
            x_curr: &xs,
            grad_prev: &zero,
            grad_curr: &zero,
            gamma_prev: 0.3,
        };
        let params = SolverParams::new(Variant::Explicit, 1.0, 0.5, 2.0);
        assert_eq!(three_term_x_recurrence(&h, &params).unwrap(), xs);
    }

    #[test]
    fn single_step_hand_evaluation() {
        // μ = 0, L = 1, γ0 = 1: α0 = 1, β0 = 1, γ1 = 1/2, α1 = 1/√2, β1 = √2.
        let (x0, x1) = (dvector![1.0], dvector![0.5]);
        let (g0, g1) = (dvector![1.0], dvector![0.5]);
        let h = RecurrenceHistory {
            k: 1,
            x_prev: &x0,
            x_curr: &x1,
            grad_prev: &g0,
            grad_curr: &g1,
            gamma_prev: 1.0,
        };
        let params = SolverParams::new(Variant::Explicit, 1.0, 0.0, 1.0);
        let a1 = 0.5f64.sqrt();
        let b1 = 2f64.sqrt();
        let d0 = -0.5;
        let d1 = (d0 - (b1 * 0.5 - 1.0) - 0.5) / (0.5 * 2.0 * (1.0 + a1));
        let expected = 0.5 + a1 * d1;
        let got = three_term_x_recurrence(&h, &params).unwrap()[0];
        assert!((got - expected).abs() < 1e-15, "{got} vs {expected}");
    }
}
