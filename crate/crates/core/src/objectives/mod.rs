//! Objective functions: smooth μ-convex oracles, composite `h + g` problems,
//! proximal operators, and the validation battery that checks declared
//! constants against the oracles.
//!
//! Every objective works on dense vectors in ℝⁿ with the Euclidean inner
//! product. Objectives are immutable once built and can be shared across
//! threads.

mod fixture;
mod least_squares;
mod logistic;
mod prox;
mod quadratic;
mod reference;
mod validate;

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{ensure_nonnegative, Error, Result};

pub use fixture::{
    make_lasso, make_logistic, make_quadratic, random_lasso, random_lasso_fixture, random_logistic,
    random_quadratic, Fixture, FixtureDocument, MAX_FIXTURE_ENTRIES,
};
pub use least_squares::LeastSquares;
pub use logistic::Logistic;
pub use prox::{prox_l1, subgradient_from_prox, BoxIndicator, L1Norm, NonNegative, Zero};
pub use quadratic::Quadratic;
pub use reference::{proximal_gradient_reference, ReferenceOptions, ReferenceSolution};
pub use validate::{
    validate_objective, ValidationReport, MINIMIZER_GRADIENT_TOLERANCE, VALIDATION_TOLERANCE,
};

/// Dense real vector used throughout the crate.
pub type Vector = DVector<f64>;

/// A differentiable μ-convex function with an `L`-Lipschitz gradient.
///
/// `lipschitz` and `strong_convexity` are declared constants. They are not
/// estimated; [`validate_objective`] checks them against the oracles.
pub trait SmoothObjective: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn value(&self, x: &Vector) -> f64;
    fn gradient(&self, x: &Vector) -> Vector;
    fn lipschitz(&self) -> f64;
    fn strong_convexity(&self) -> f64;
    /// Reference minimizer `x*`, when known.
    fn minimizer(&self) -> Option<&Vector>;
    /// Reference optimal value `f(x*)`, when known.
    fn min_value(&self) -> Option<f64>;
}

/// A convex, lower-semicontinuous function with a computable proximal map.
///
/// `value` may return `f64::INFINITY` (indicator functions).
pub trait ProxFunction: Send + Sync + fmt::Debug {
    fn value(&self, x: &Vector) -> f64;
    /// `argmin_y g(y) + ‖x − y‖² / (2·step)`; `step` must be positive.
    fn prox(&self, x: &Vector, step: f64) -> Vector;
    /// Short identifier used in reports and fixture documents.
    fn name(&self) -> &'static str;
}

/// A μ-convex function whose full proximal map `prox_{s f}` is available in
/// closed form. This is what the semi-implicit scheme needs.
pub trait Proximable: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn value(&self, x: &Vector) -> f64;
    fn prox(&self, y: &Vector, step: f64) -> Vector;
    fn strong_convexity(&self) -> f64;
    fn minimizer(&self) -> Option<&Vector>;
    fn min_value(&self) -> Option<f64>;
}

/// `f = h + g` with smooth `h` and prox-friendly `g`.
#[derive(Debug, Clone)]
pub struct Composite {
    smooth: Arc<dyn SmoothObjective>,
    nonsmooth: Arc<dyn ProxFunction>,
    mu: f64,
    minimizer: Option<Vector>,
    min_value: Option<f64>,
}

impl Composite {
    /// `mu` is the convexity modulus of the whole sum `h + g`.
    pub fn new(
        smooth: Arc<dyn SmoothObjective>,
        nonsmooth: Arc<dyn ProxFunction>,
        mu: f64,
    ) -> Result<Self> {
        ensure_nonnegative("mu", mu)?;
        Ok(Self {
            smooth,
            nonsmooth,
            mu,
            minimizer: None,
            min_value: None,
        })
    }

    /// Wraps a smooth objective as `h + 0`, inheriting its reference solution.
    pub fn smooth_only(smooth: Arc<dyn SmoothObjective>) -> Self {
        let mu = smooth.strong_convexity();
        let minimizer = smooth.minimizer().cloned();
        let min_value = smooth.min_value();
        Self {
            smooth,
            nonsmooth: Arc::new(Zero),
            mu,
            minimizer,
            min_value,
        }
    }

    pub fn with_reference(mut self, minimizer: Vector, min_value: f64) -> Result<Self> {
        if minimizer.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: minimizer.len(),
            });
        }
        self.minimizer = Some(minimizer);
        self.min_value = Some(min_value);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.smooth.dim()
    }

    pub fn smooth(&self) -> &dyn SmoothObjective {
        self.smooth.as_ref()
    }

    pub fn smooth_arc(&self) -> Arc<dyn SmoothObjective> {
        Arc::clone(&self.smooth)
    }

    pub fn nonsmooth(&self) -> &dyn ProxFunction {
        self.nonsmooth.as_ref()
    }

    /// `h(x) + g(x)`, summed in that order.
    pub fn value(&self, x: &Vector) -> f64 {
        self.smooth.value(x) + self.nonsmooth.value(x)
    }

    pub fn lipschitz(&self) -> f64 {
        self.smooth.lipschitz()
    }

    pub fn strong_convexity(&self) -> f64 {
        self.mu
    }

    pub fn minimizer(&self) -> Option<&Vector> {
        self.minimizer.as_ref()
    }

    pub fn min_value(&self) -> Option<f64> {
        self.min_value
    }

    /// Gradient mapping `L (x − prox_{g/L}(x − ∇h(x)/L))`.
    pub fn gradient_mapping(&self, x: &Vector) -> Vector {
        let l = self.lipschitz();
        let forward = x - self.smooth.gradient(x) / l;
        (x - self.nonsmooth.prox(&forward, 1.0 / l)) * l
    }
}

/// A purely nonsmooth objective `f = g`, whose full prox is the prox of `g`.
#[derive(Debug, Clone)]
pub struct PureNonsmooth {
    g: Arc<dyn ProxFunction>,
    dim: usize,
    mu: f64,
    minimizer: Option<Vector>,
    min_value: Option<f64>,
}

impl PureNonsmooth {
    pub fn new(g: Arc<dyn ProxFunction>, dim: usize, mu: f64) -> Result<Self> {
        ensure_nonnegative("mu", mu)?;
        Ok(Self {
            g,
            dim,
            mu,
            minimizer: None,
            min_value: None,
        })
    }

    pub fn with_reference(mut self, minimizer: Vector, min_value: f64) -> Result<Self> {
        if minimizer.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: minimizer.len(),
            });
        }
        self.minimizer = Some(minimizer);
        self.min_value = Some(min_value);
        Ok(self)
    }

    pub fn nonsmooth(&self) -> &dyn ProxFunction {
        self.g.as_ref()
    }
}

impl Proximable for PureNonsmooth {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &Vector) -> f64 {
        self.g.value(x)
    }

    fn prox(&self, y: &Vector, step: f64) -> Vector {
        self.g.prox(y, step)
    }

    fn strong_convexity(&self) -> f64 {
        self.mu
    }

    fn minimizer(&self) -> Option<&Vector> {
        self.minimizer.as_ref()
    }

    fn min_value(&self) -> Option<f64> {
        self.min_value
    }
}

/// Largest and smallest eigenvalue of a symmetric matrix, smallest clamped at
/// zero when it is within rounding of zero.
pub(crate) fn spectrum_bounds(eigenvalues: &Vector) -> (f64, f64) {
    let max = eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let mut min = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min.abs() <= zero_eigenvalue_tolerance(max, eigenvalues.len()) {
        min = 0.0;
    }
    (max, min)
}

pub(crate) fn zero_eigenvalue_tolerance(max_eigenvalue: f64, dim: usize) -> f64 {
    64.0 * f64::EPSILON * (dim as f64) * max_eigenvalue.abs().max(1.0)
}
