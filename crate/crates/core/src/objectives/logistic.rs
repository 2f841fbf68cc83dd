use nalgebra::{DMatrix, SymmetricEigen};

use super::{SmoothObjective, Vector};
use crate::error::{ensure_nonnegative, Error, Result};

/// Ridge-regularized logistic loss
/// `f(x) = (1/n) Σ log(1 + exp(−yᵢ aᵢᵀx)) + (ridge/2)‖x‖²`.
#[derive(Debug, Clone)]
pub struct Logistic {
    features: DMatrix<f64>,
    labels: Vector,
    ridge: f64,
    lipschitz: f64,
    minimizer: Option<Vector>,
    min_value: Option<f64>,
}

impl Logistic {
    /// `features` is `n × d` with one sample per row; `labels` must be ±1.
    pub fn new(features: DMatrix<f64>, labels: Vector, ridge: f64) -> Result<Self> {
        ensure_nonnegative("ridge", ridge)?;
        if labels.len() != features.nrows() {
            return Err(Error::DimensionMismatch {
                expected: features.nrows(),
                got: labels.len(),
            });
        }
        if features.nrows() == 0 || features.ncols() == 0 {
            return Err(Error::NonPositive {
                name: "number of samples and features",
                value: 0.0,
            });
        }
        if let Some((index, &value)) = labels
            .iter()
            .enumerate()
            .find(|(_, &y)| y != 1.0 && y != -1.0)
        {
            return Err(Error::InvalidLabel { index, value });
        }

        let n = features.nrows() as f64;
        let gram = features.tr_mul(&features);
        let op_norm_sq = SymmetricEigen::new(gram)
            .eigenvalues
            .iter()
            .copied()
            .fold(0.0, f64::max);
        let lipschitz = op_norm_sq / (4.0 * n) + ridge;
        Ok(Self {
            features,
            labels,
            ridge,
            lipschitz,
            minimizer: None,
            min_value: None,
        })
    }

    pub fn with_reference(mut self, minimizer: Vector, min_value: f64) -> Result<Self> {
        if minimizer.len() != self.features.ncols() {
            return Err(Error::DimensionMismatch {
                expected: self.features.ncols(),
                got: minimizer.len(),
            });
        }
        self.minimizer = Some(minimizer);
        self.min_value = Some(min_value);
        Ok(self)
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn labels(&self) -> &Vector {
        &self.labels
    }

    pub fn ridge(&self) -> f64 {
        self.ridge
    }
}

/// `log(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// `1 / (1 + e^{−z})` without overflow.
fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl SmoothObjective for Logistic {
    fn dim(&self) -> usize {
        self.features.ncols()
    }

    fn value(&self, x: &Vector) -> f64 {
        let margins = &self.features * x;
        let n = self.labels.len() as f64;
        let loss: f64 = margins
            .iter()
            .zip(self.labels.iter())
            .map(|(m, y)| softplus(-y * m))
            .sum();
        loss / n + 0.5 * self.ridge * x.norm_squared()
    }

    fn gradient(&self, x: &Vector) -> Vector {
        let margins = &self.features * x;
        let n = self.labels.len() as f64;
        // d/dm log(1 + e^{−y m}) = −y σ(−y m)
        let weights = Vector::from_iterator(
            margins.len(),
            margins
                .iter()
                .zip(self.labels.iter())
                .map(|(m, y)| -y * sigmoid(-y * m) / n),
        );
        self.features.tr_mul(&weights) + x * self.ridge
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    fn strong_convexity(&self) -> f64 {
        self.ridge
    }

    fn minimizer(&self) -> Option<&Vector> {
        self.minimizer.as_ref()
    }

    fn min_value(&self) -> Option<f64> {
        self.min_value
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::dvector;

    #[test]
    fn zero_feature_is_constant() {
        let f = Logistic::new(DMatrix::zeros(1, 1), dvector![1.0], 0.0).unwrap();
        for x in [-3.0, 0.0, 5.0] {
            assert_relative_eq!(f.value(&dvector![x]), 2f64.ln(), epsilon = 1e-15);
            assert_eq!(f.gradient(&dvector![x])[0], 0.0);
        }
    }

    #[test]
    fn value_at_origin_is_log_two() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, -0.5, 0.3, 4.0, -1.0]);
        let f = Logistic::new(a, dvector![1.0, -1.0, 1.0], 0.0).unwrap();
        assert_relative_eq!(f.value(&Vector::zeros(2)), 2f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn single_sample_gradient_at_origin() {
        let f = Logistic::new(DMatrix::from_element(1, 1, 1.0), dvector![1.0], 0.0).unwrap();
        let g = f.gradient(&dvector![0.0]);
        assert_relative_eq!(g[0], -0.5, epsilon = 1e-15);
        // Central difference of the value oracle.
        let h = 1e-6;
        let fd = (f.value(&dvector![h]) - f.value(&dvector![-h])) / (2.0 * h);
        assert_relative_eq!(fd, -0.5, epsilon = 1e-9);
    }

    #[test]
    fn rejects_bad_label() {
        let err = Logistic::new(DMatrix::zeros(2, 1), dvector![1.0, 0.0], 0.0).unwrap_err();
        assert!(matches!(err, Error::InvalidLabel { index: 1, .. }));
    }

    #[test]
    fn large_margins_do_not_overflow() {
        let f = Logistic::new(DMatrix::from_element(1, 1, 1.0), dvector![-1.0], 0.0).unwrap();
        let v = f.value(&dvector![800.0]);
        assert_relative_eq!(v, 800.0, epsilon = 1e-12);
        assert!(f.gradient(&dvector![800.0])[0].is_finite());
    }
}
