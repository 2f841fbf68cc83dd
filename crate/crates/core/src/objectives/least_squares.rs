use nalgebra::{DMatrix, SymmetricEigen};

use super::{spectrum_bounds, SmoothObjective, Vector};
use crate::error::{Error, Result};

/// `h(x) = ½‖Ax − b‖²`, the smooth part of a lasso problem.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    a: DMatrix<f64>,
    b: Vector,
    lipschitz: f64,
    mu: f64,
    minimizer: Option<Vector>,
    min_value: Option<f64>,
}

impl LeastSquares {
    pub fn new(a: DMatrix<f64>, b: Vector) -> Result<Self> {
        if a.nrows() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                got: b.len(),
            });
        }
        if a.ncols() == 0 {
            return Err(Error::NonPositive {
                name: "number of columns",
                value: 0.0,
            });
        }
        let gram = a.tr_mul(&a);
        let eigenvalues = SymmetricEigen::new(gram.clone()).eigenvalues;
        let (lipschitz, mu) = spectrum_bounds(&eigenvalues);
        let mu = mu.max(0.0);
        if lipschitz <= 0.0 {
            return Err(Error::NonPositive {
                name: "largest eigenvalue of AᵀA",
                value: lipschitz,
            });
        }
        let (minimizer, min_value) = if mu > 0.0 {
            let x = gram.cholesky().map(|chol| chol.solve(&a.tr_mul(&b)));
            let value = x.as_ref().map(|x| 0.5 * (&a * x - &b).norm_squared());
            (x, value)
        } else {
            (None, None)
        };
        Ok(Self {
            a,
            b,
            lipschitz,
            mu,
            minimizer,
            min_value,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn target(&self) -> &Vector {
        &self.b
    }
}

impl SmoothObjective for LeastSquares {
    fn dim(&self) -> usize {
        self.a.ncols()
    }

    fn value(&self, x: &Vector) -> f64 {
        0.5 * (&self.a * x - &self.b).norm_squared()
    }

    fn gradient(&self, x: &Vector) -> Vector {
        self.a.tr_mul(&(&self.a * x - &self.b))
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
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
