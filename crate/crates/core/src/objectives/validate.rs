use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{SmoothObjective, Vector};

/// Worst relative violation accepted by [`ValidationReport::passed`].
pub const VALIDATION_TOLERANCE: f64 = 1e-5;

/// Largest admissible `‖∇f(x*)‖` for a declared reference minimizer.
pub const MINIMIZER_GRADIENT_TOLERANCE: f64 = 1e-8;

/// Worst-case violations found by [`validate_objective`]. All entries are
/// relative and zero when the invariant holds exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub probes: usize,
    pub seed: u64,
    /// `‖∇f − ∇_fd f‖ / max(‖∇f‖, 1)` against central differences.
    pub gradient_error: f64,
    /// Lower side of the sandwich `(μ/2)r² ≤ f(x) − f(y) − ⟨∇f(y), x−y⟩`.
    pub convexity_violation: f64,
    /// Upper side of the sandwich, `… ≤ (L/2)r²`.
    pub upper_bound_violation: f64,
    /// `‖∇f(x) − ∇f(y)‖ ≤ L‖x − y‖`.
    pub lipschitz_violation: f64,
    /// `‖∇f(x*)‖`, when a reference minimizer is declared.
    pub minimizer_gradient_norm: Option<f64>,
}

impl ValidationReport {
    pub fn worst_violation(&self) -> f64 {
        self.gradient_error
            .max(self.convexity_violation)
            .max(self.upper_bound_violation)
            .max(self.lipschitz_violation)
    }

    pub fn passed(&self) -> bool {
        self.worst_violation() <= VALIDATION_TOLERANCE
            && self
                .minimizer_gradient_norm
                .map_or(true, |g| g <= MINIMIZER_GRADIENT_TOLERANCE)
    }
}

/// Runs the oracle battery at `probes` random point pairs drawn around the
/// reference minimizer (or the origin).
///
/// Violations are reported, never returned as errors.
pub fn validate_objective(obj: &dyn SmoothObjective, probes: usize, seed: u64) -> ValidationReport {
    let n = obj.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let center = obj.minimizer().cloned().unwrap_or_else(|| Vector::zeros(n));
    let sample = |rng: &mut ChaCha8Rng| -> Vector {
        let noise = Vector::from_iterator(n, (0..n).map(|_| StandardNormal.sample(rng)));
        &center + noise
    };

    let (lipschitz, mu) = (obj.lipschitz(), obj.strong_convexity());
    let mut report = ValidationReport {
        probes,
        seed,
        gradient_error: 0.0,
        convexity_violation: 0.0,
        upper_bound_violation: 0.0,
        lipschitz_violation: 0.0,
        minimizer_gradient_norm: obj.minimizer().map(|xs| obj.gradient(xs).norm()),
    };

    for _ in 0..probes.max(1) {
        let x = sample(&mut rng);
        let y = sample(&mut rng);
        let (fx, fy) = (obj.value(&x), obj.value(&y));
        let (gx, gy) = (obj.gradient(&x), obj.gradient(&y));

        let fd = central_difference(obj, &x);
        let err = (&fd - &gx).norm() / gx.norm().max(1.0);
        report.gradient_error = report.gradient_error.max(err);

        let d = &x - &y;
        let r2 = d.norm_squared();
        let bregman = fx - fy - gy.dot(&d);
        let scale = 0.5 * lipschitz * r2 + fx.abs() + fy.abs();
        if scale > 0.0 {
            let lower = (0.5 * mu * r2 - bregman).max(0.0) / scale;
            let upper = (bregman - 0.5 * lipschitz * r2).max(0.0) / scale;
            report.convexity_violation = report.convexity_violation.max(lower);
            report.upper_bound_violation = report.upper_bound_violation.max(upper);
        }

        let dist = d.norm();
        if dist > 0.0 {
            let excess = ((&gx - &gy).norm() - lipschitz * dist).max(0.0) / (lipschitz * dist);
            report.lipschitz_violation = report.lipschitz_violation.max(excess);
        }
    }
    report
}

fn central_difference(obj: &dyn SmoothObjective, x: &Vector) -> Vector {
    let mut probe = x.clone();
    Vector::from_iterator(
        x.len(),
        (0..x.len()).map(|i| {
            let h = 1e-5 * x[i].abs().max(1.0);
            let xi = probe[i];
            probe[i] = xi + h;
            let plus = obj.value(&probe);
            probe[i] = xi - h;
            let minus = obj.value(&probe);
            probe[i] = xi;
            (plus - minus) / (2.0 * h)
        }),
    )
}
