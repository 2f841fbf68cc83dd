use super::{ProxFunction, Vector};
use crate::error::{ensure_positive, Error, Result};

/// Soft-thresholding: `sign(xᵢ)·max(|xᵢ| − λ, 0)`, the prox of `λ‖·‖₁`.
pub fn prox_l1(x: &Vector, lambda: f64) -> Result<Vector> {
    ensure_positive("lambda", lambda)?;
    Ok(soft_threshold(x, lambda))
}

fn soft_threshold(x: &Vector, threshold: f64) -> Vector {
    x.map(|xi| xi.signum() * (xi.abs() - threshold).max(0.0))
}

/// Recovers the subgradient `(input − output)/λ ∈ ∂g(output)` certified by the
/// optimality condition of `output = prox_{λg}(input)`.
pub fn subgradient_from_prox(input: &Vector, output: &Vector, lambda: f64) -> Result<Vector> {
    ensure_positive("lambda", lambda)?;
    if input.len() != output.len() {
        return Err(Error::DimensionMismatch {
            expected: input.len(),
            got: output.len(),
        });
    }
    Ok((input - output) / lambda)
}

/// `g ≡ 0`; its prox is the identity.
#[derive(Debug, Clone, Copy, Default)]
pub struct Zero;

impl ProxFunction for Zero {
    fn value(&self, _x: &Vector) -> f64 {
        0.0
    }

    fn prox(&self, x: &Vector, _step: f64) -> Vector {
        x.clone()
    }

    fn name(&self) -> &'static str {
        "zero"
    }
}

/// `g(x) = weight·‖x‖₁`.
#[derive(Debug, Clone, Copy)]
pub struct L1Norm {
    weight: f64,
}

impl L1Norm {
    pub fn new(weight: f64) -> Result<Self> {
        ensure_positive("weight", weight)?;
        Ok(Self { weight })
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }
}

impl ProxFunction for L1Norm {
    fn value(&self, x: &Vector) -> f64 {
        self.weight * x.lp_norm(1)
    }

    fn prox(&self, x: &Vector, step: f64) -> Vector {
        debug_assert!(step > 0.0);
        soft_threshold(x, step * self.weight)
    }

    fn name(&self) -> &'static str {
        "l1"
    }
}

/// Indicator of the nonnegative orthant.
#[derive(Debug, Clone, Copy, Default)]
pub struct NonNegative;

impl ProxFunction for NonNegative {
    fn value(&self, x: &Vector) -> f64 {
        if x.iter().all(|&xi| xi >= 0.0) {
            0.0
        } else {
            f64::INFINITY
        }
    }

    fn prox(&self, x: &Vector, _step: f64) -> Vector {
        x.map(|xi| xi.max(0.0))
    }

    fn name(&self) -> &'static str {
        "nonnegative"
    }
}

/// Indicator of the box `[lower, upper]ⁿ`.
#[derive(Debug, Clone, Copy)]
pub struct BoxIndicator {
    lower: f64,
    upper: f64,
}

impl BoxIndicator {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower <= upper) {
            return Err(Error::NonPositive {
                name: "box width (upper − lower)",
                value: upper - lower,
            });
        }
        Ok(Self { lower, upper })
    }
}

impl ProxFunction for BoxIndicator {
    fn value(&self, x: &Vector) -> f64 {
        if x.iter().all(|&xi| xi >= self.lower && xi <= self.upper) {
            0.0
        } else {
            f64::INFINITY
        }
    }

    fn prox(&self, x: &Vector, _step: f64) -> Vector {
        x.map(|xi| xi.clamp(self.lower, self.upper))
    }

    fn name(&self) -> &'static str {
        "box"
    }
}
