use nalgebra::{DMatrix, SymmetricEigen};

use super::{spectrum_bounds, zero_eigenvalue_tolerance, Proximable, SmoothObjective, Vector};
use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};

/// `f(x) = ½ xᵀQx − bᵀx` with symmetric positive-semidefinite `Q`.
///
/// The spectrum of `Q` is computed once. It gives the declared constants
/// (`L = λ_max`, `μ = λ_min`), the minimizer (pseudo-inverse solve), and the
/// closed-form proximal map.
#[derive(Debug, Clone)]
pub struct Quadratic {
    q: DMatrix<f64>,
    b: Vector,
    eigenvalues: Vector,
    eigenvectors: DMatrix<f64>,
    lipschitz: f64,
    mu: f64,
    minimizer: Vector,
    min_value: f64,
}

impl Quadratic {
    pub fn new(q: DMatrix<f64>, b: Vector) -> Result<Self> {
        let n = q.nrows();
        if q.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: q.ncols(),
            });
        }
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: b.len(),
            });
        }
        if n == 0 {
            return Err(Error::NonPositive {
                name: "dimension",
                value: 0.0,
            });
        }

        let scale = q.amax().max(f64::MIN_POSITIVE);
        let asymmetry = (&q - q.transpose()).amax();
        if asymmetry > 1e-12 * scale {
            return Err(Error::NotSymmetric { asymmetry });
        }
        // Symmetrize away the rounding-level asymmetry the check tolerated.
        let q = (&q + q.transpose()) * 0.5;

        let eigen = SymmetricEigen::new(q.clone());
        let (lipschitz, mu) = spectrum_bounds(&eigen.eigenvalues);
        if mu < 0.0 {
            return Err(Error::NotPositiveSemidefinite { min_eigenvalue: mu });
        }
        if lipschitz <= 0.0 {
            return Err(Error::NonPositive {
                name: "largest eigenvalue of Q",
                value: lipschitz,
            });
        }

        let zero_tol = zero_eigenvalue_tolerance(lipschitz, n);
        let minimizer = match q.clone().cholesky() {
            Some(chol) if mu > 0.0 => chol.solve(&b),
            _ => {
                // Pseudo-inverse through the eigenbasis.
                let coords = eigen.eigenvectors.tr_mul(&b);
                let scaled = Vector::from_iterator(
                    n,
                    coords
                        .iter()
                        .zip(eigen.eigenvalues.iter())
                        .map(|(c, &lam)| if lam.abs() > zero_tol { c / lam } else { 0.0 }),
                );
                &eigen.eigenvectors * scaled
            }
        };
        let residual = (&q * &minimizer - &b).norm();
        if residual > 1e-9 * (1.0 + b.norm()) {
            return Err(Error::NoMinimizer);
        }

        let min_value = 0.5 * minimizer.dot(&(&q * &minimizer)) - b.dot(&minimizer);
        Ok(Self {
            q,
            b,
            eigenvalues: eigen.eigenvalues,
            eigenvectors: eigen.eigenvectors,
            lipschitz,
            mu,
            minimizer,
            min_value,
        })
    }

    fn lipschitz_of_q(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(0.0, f64::max)
    }

    /// Overrides the declared constants. Used to model misdeclared problems;
    /// [`super::validate_objective`] will flag inconsistent values.
    pub fn with_constants(mut self, lipschitz: f64, mu: f64) -> Result<Self> {
        ensure_positive("L", lipschitz)?;
        ensure_nonnegative("mu", mu)?;
        self.lipschitz = lipschitz;
        self.mu = mu;
        Ok(self)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn linear_term(&self) -> &Vector {
        &self.b
    }

    pub fn eigenvalues(&self) -> &Vector {
        &self.eigenvalues
    }

    /// Hessian-vector product `Q d`.
    pub fn hessian_apply(&self, d: &Vector) -> Vector {
        &self.q * d
    }
}

impl SmoothObjective for Quadratic {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn value(&self, x: &Vector) -> f64 {
        0.5 * x.dot(&(&self.q * x)) - self.b.dot(x)
    }

    fn gradient(&self, x: &Vector) -> Vector {
        &self.q * x - &self.b
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    fn strong_convexity(&self) -> f64 {
        self.mu
    }

    fn minimizer(&self) -> Option<&Vector> {
        Some(&self.minimizer)
    }

    fn min_value(&self) -> Option<f64> {
        Some(self.min_value)
    }
}

impl Proximable for Quadratic {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn value(&self, x: &Vector) -> f64 {
        SmoothObjective::value(self, x)
    }

    /// `y − s(I + sQ)⁻¹∇f(y)`, evaluated in the eigenbasis. Stays accurate
    /// for very large `s` and returns stationary points unchanged.
    ///
    /// On the null space of `Q` the gradient component is zero in exact
    /// arithmetic, so it is dropped instead of being amplified by `s`.
    fn prox(&self, y: &Vector, step: f64) -> Vector {
        let grad = &self.q * y - &self.b;
        let mut coords = self.eigenvectors.tr_mul(&grad);
        let zero_tol = zero_eigenvalue_tolerance(self.lipschitz_of_q(), self.b.len());
        for (c, &lam) in coords.iter_mut().zip(self.eigenvalues.iter()) {
            *c *= if lam > zero_tol {
                step / (1.0 + step * lam)
            } else {
                0.0
            };
        }
        y - &self.eigenvectors * coords
    }

    fn strong_convexity(&self) -> f64 {
        self.mu
    }

    fn minimizer(&self) -> Option<&Vector> {
        Some(&self.minimizer)
    }

    fn min_value(&self) -> Option<f64> {
        Some(self.min_value)
    }
}
