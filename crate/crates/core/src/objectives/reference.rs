use super::{Composite, Vector};

#[derive(Debug, Clone, Copy)]
pub struct ReferenceOptions {
    /// Stop once the gradient-mapping norm falls below this value.
    pub tolerance: f64,
    pub max_iter: usize,
}

impl Default for ReferenceOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-13,
            max_iter: 2_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReferenceSolution {
    pub minimizer: Vector,
    pub min_value: f64,
    pub iterations: usize,
    pub gradient_mapping_norm: f64,
}

/// High-accuracy proximal gradient (`x ← prox_{g/L}(x − ∇h(x)/L)`) used to
/// produce reference minimizers for problems without a closed form.
///
/// Stops on the gradient-mapping norm, or when the iterate no longer moves in
/// floating point.
pub fn proximal_gradient_reference(
    problem: &Composite,
    x0: &Vector,
    options: ReferenceOptions,
) -> ReferenceSolution {
    let l = problem.lipschitz();
    let mut x = x0.clone();
    let mut iterations = 0;
    let mut mapping_norm = f64::INFINITY;
    while iterations < options.max_iter {
        let forward = &x - problem.smooth().gradient(&x) / l;
        let next = problem.nonsmooth().prox(&forward, 1.0 / l);
        mapping_norm = (&x - &next).norm() * l;
        let stalled = next == x;
        x = next;
        iterations += 1;
        if mapping_norm <= options.tolerance || stalled {
            break;
        }
    }
    let min_value = problem.value(&x);
    ReferenceSolution {
        minimizer: x,
        min_value,
        iterations,
        gradient_mapping_norm: mapping_norm,
    }
}
