//! Problem builders, seeded synthetic fixtures, and the JSON fixture document.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{
    proximal_gradient_reference, Composite, L1Norm, LeastSquares, Logistic, Quadratic,
    ReferenceOptions, SmoothObjective, Vector,
};
use crate::error::{ensure_positive, Error, Result};

/// Fixture documents carry at most this many matrix entries.
pub const MAX_FIXTURE_ENTRIES: usize = 10_000;

/// `f(x) = ½xᵀQx − bᵀx` with `L = λ_max(Q)`, `μ = λ_min(Q)`.
pub fn make_quadratic(q: DMatrix<f64>, b: Vector) -> Result<Quadratic> {
    Quadratic::new(q, b)
}

/// Ridge-regularized logistic regression; the minimizer is left unset.
pub fn make_logistic(features: DMatrix<f64>, labels: Vector, ridge: f64) -> Result<Logistic> {
    Logistic::new(features, labels, ridge)
}

/// `½‖Ax − b‖² + weight·‖x‖₁` with `μ = λ_min(AᵀA)`; the minimizer is left
/// unset.
pub fn make_lasso(a: DMatrix<f64>, b: Vector, weight: f64) -> Result<Composite> {
    ensure_positive("weight", weight)?;
    let h = LeastSquares::new(a, b)?;
    let mu = h.strong_convexity();
    Composite::new(Arc::new(h), Arc::new(L1Norm::new(weight)?), mu)
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

/// Quadratic in dimension `dim` with spectrum evenly spaced on `[mu, lipschitz]`
/// in a random orthonormal basis. The linear term is `Q x_ref` for a random
/// `x_ref`, so a minimizer exists even when `mu = 0`.
pub fn random_quadratic(dim: usize, mu: f64, lipschitz: f64, seed: u64) -> Result<Quadratic> {
    ensure_positive("L", lipschitz)?;
    if !(0.0..=lipschitz).contains(&mu) {
        return Err(Error::Fixture(format!(
            "mu = {mu} must lie in [0, L = {lipschitz}]"
        )));
    }
    if dim == 0 {
        return Err(Error::Fixture("dimension must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = gaussian_matrix(&mut rng, dim, dim).qr().q();
    let spectrum = Vector::from_fn(dim, |i, _| {
        if dim == 1 {
            lipschitz
        } else {
            mu + (lipschitz - mu) * i as f64 / (dim - 1) as f64
        }
    });
    let q = &basis * DMatrix::from_diagonal(&spectrum) * basis.transpose();
    let q = (&q + q.transpose()) * 0.5;
    let x_ref = gaussian_vector(&mut rng, dim);
    let b = &q * x_ref;
    // Declare the generating spectrum, not the re-estimated one, so that the
    // constants are exact.
    Quadratic::new(q, b)?.with_constants(lipschitz, mu)
}

/// Logistic regression on Gaussian features with labels from a random
/// separating direction flipped with probability 0.1. The reference minimizer
/// is attached.
pub fn random_logistic(samples: usize, dim: usize, ridge: f64, seed: u64) -> Result<Logistic> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = gaussian_matrix(&mut rng, samples, dim);
    let w = gaussian_vector(&mut rng, dim);
    let margins = &a * &w;
    let labels = margins.map(|m| {
        let y = if m >= 0.0 { 1.0 } else { -1.0 };
        if rng.gen::<f64>() < 0.1 {
            -y
        } else {
            y
        }
    });
    let f = Logistic::new(a, labels, ridge)?;
    let reference = proximal_gradient_reference(
        &Composite::smooth_only(Arc::new(f.clone())),
        &Vector::zeros(dim),
        ReferenceOptions::default(),
    );
    f.with_reference(reference.minimizer, reference.min_value)
}

/// Lasso on a Gaussian `rows × cols` design with a sparse planted signal and
/// small noise. The reference minimizer is attached.
pub fn random_lasso(rows: usize, cols: usize, weight: f64, seed: u64) -> Result<Composite> {
    let (a, b) = lasso_data(rows, cols, seed);
    attach_lasso_reference(make_lasso(a, b, weight)?)
}

/// [`random_lasso`] as a [`Fixture`], keeping the design and target.
pub fn random_lasso_fixture(rows: usize, cols: usize, weight: f64, seed: u64) -> Result<Fixture> {
    let (a, b) = lasso_data(rows, cols, seed);
    Fixture::lasso(a, b, weight)
}

fn lasso_data(rows: usize, cols: usize, seed: u64) -> (DMatrix<f64>, Vector) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = gaussian_matrix(&mut rng, rows, cols);
    let signal = Vector::from_fn(cols, |i, _| {
        if i % 3 == 0 {
            1.0 + i as f64 / cols as f64
        } else {
            0.0
        }
    });
    let noise = gaussian_vector(&mut rng, rows) * 0.1;
    let b = &a * signal + noise;
    (a, b)
}

fn attach_lasso_reference(comp: Composite) -> Result<Composite> {
    let reference = proximal_gradient_reference(
        &comp,
        &Vector::zeros(comp.dim()),
        ReferenceOptions::default(),
    );
    comp.with_reference(reference.minimizer, reference.min_value)
}

/// A problem loaded from, or serializable to, a [`FixtureDocument`].
#[derive(Debug, Clone)]
pub enum Fixture {
    Quadratic(Quadratic),
    Logistic(Logistic),
    Lasso {
        problem: Composite,
        a: DMatrix<f64>,
        b: Vector,
        weight: f64,
    },
}

impl Fixture {
    pub fn kind(&self) -> &'static str {
        match self {
            Fixture::Quadratic(_) => "quadratic",
            Fixture::Logistic(_) => "logistic",
            Fixture::Lasso { .. } => "lasso",
        }
    }

    /// Lasso fixture with the reference minimizer attached.
    pub fn lasso(a: DMatrix<f64>, b: Vector, weight: f64) -> Result<Self> {
        let problem = attach_lasso_reference(make_lasso(a.clone(), b.clone(), weight)?)?;
        Ok(Fixture::Lasso {
            problem,
            a,
            b,
            weight,
        })
    }

    /// The smooth part (the whole objective for smooth fixtures).
    pub fn smooth(&self) -> Arc<dyn SmoothObjective> {
        match self {
            Fixture::Quadratic(q) => Arc::new(q.clone()),
            Fixture::Logistic(l) => Arc::new(l.clone()),
            Fixture::Lasso { problem, .. } => problem.smooth_arc(),
        }
    }

    /// The objective as `h + g` (`g ≡ 0` for smooth fixtures).
    pub fn composite(&self) -> Composite {
        match self {
            Fixture::Lasso { problem, .. } => problem.clone(),
            _ => Composite::smooth_only(self.smooth()),
        }
    }

    pub fn dim(&self) -> usize {
        self.smooth().dim()
    }

    pub fn to_document(&self) -> FixtureDocument {
        fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
            m.transpose().iter().copied().collect()
        }
        match self {
            Fixture::Quadratic(q) => FixtureDocument {
                kind: "quadratic".into(),
                dims: vec![q.matrix().nrows(), q.matrix().ncols()],
                matrix: row_major(q.matrix()),
                vector: q.linear_term().iter().copied().collect(),
                lipschitz: q.lipschitz(),
                mu: SmoothObjective::strong_convexity(q),
                weight: None,
                ridge: None,
                x_star: SmoothObjective::minimizer(q).map(|x| x.iter().copied().collect()),
                f_star: SmoothObjective::min_value(q),
            },
            Fixture::Logistic(l) => FixtureDocument {
                kind: "logistic".into(),
                dims: vec![l.features().nrows(), l.features().ncols()],
                matrix: row_major(l.features()),
                vector: l.labels().iter().copied().collect(),
                lipschitz: l.lipschitz(),
                mu: l.strong_convexity(),
                weight: None,
                ridge: Some(l.ridge()),
                x_star: l.minimizer().map(|x| x.iter().copied().collect()),
                f_star: l.min_value(),
            },
            Fixture::Lasso {
                problem,
                a,
                b,
                weight,
            } => FixtureDocument {
                kind: "lasso".into(),
                dims: vec![a.nrows(), a.ncols()],
                matrix: row_major(a),
                vector: b.iter().copied().collect(),
                lipschitz: problem.lipschitz(),
                mu: problem.strong_convexity(),
                weight: Some(*weight),
                ridge: None,
                x_star: problem.minimizer().map(|x| x.iter().copied().collect()),
                f_star: problem.min_value(),
            },
        }
    }

    pub fn from_document(doc: &FixtureDocument) -> Result<Self> {
        let [rows, cols] = match doc.dims.as_slice() {
            [r, c] => [*r, *c],
            other => {
                return Err(Error::Fixture(format!(
                    "dims must be [rows, cols], got {other:?}"
                )))
            }
        };
        if rows * cols > MAX_FIXTURE_ENTRIES {
            return Err(Error::Fixture(format!(
                "{rows}×{cols} matrix exceeds {MAX_FIXTURE_ENTRIES} entries"
            )));
        }
        if doc.matrix.len() != rows * cols {
            return Err(Error::Fixture(format!(
                "matrix payload has {} entries, dims say {}",
                doc.matrix.len(),
                rows * cols
            )));
        }
        let m = DMatrix::from_row_slice(rows, cols, &doc.matrix);
        let v = Vector::from_column_slice(&doc.vector);
        let reference = match (&doc.x_star, doc.f_star) {
            (Some(x), Some(f)) => Some((Vector::from_column_slice(x), f)),
            (None, None) => None,
            _ => {
                return Err(Error::Fixture(
                    "x_star and f_star must be given together".into(),
                ))
            }
        };

        match doc.kind.as_str() {
            "quadratic" => {
                let q = Quadratic::new(m, v)?.with_constants(doc.lipschitz, doc.mu)?;
                Ok(Fixture::Quadratic(q))
            }
            "logistic" => {
                let ridge = doc
                    .ridge
                    .ok_or_else(|| Error::Fixture("logistic fixture requires `ridge`".into()))?;
                let mut f = Logistic::new(m, v, ridge)?;
                if let Some((x, fs)) = reference {
                    f = f.with_reference(x, fs)?;
                }
                Ok(Fixture::Logistic(f))
            }
            "lasso" => {
                let weight = doc
                    .weight
                    .ok_or_else(|| Error::Fixture("lasso fixture requires `weight`".into()))?;
                let h = LeastSquares::new(m.clone(), v.clone())?;
                let mut problem =
                    Composite::new(Arc::new(h), Arc::new(L1Norm::new(weight)?), doc.mu)?;
                problem = match reference {
                    Some((x, fs)) => problem.with_reference(x, fs)?,
                    None => attach_lasso_reference(problem)?,
                };
                Ok(Fixture::Lasso {
                    problem,
                    a: m,
                    b: v,
                    weight,
                })
            }
            other => Err(Error::Fixture(format!("unknown fixture kind `{other}`"))),
        }
    }
}

/// JSON form of a fixture. Matrices are row-major arrays of 64-bit floats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureDocument {
    pub kind: String,
    pub dims: Vec<usize>,
    pub matrix: Vec<f64>,
    pub vector: Vec<f64>,
    #[serde(rename = "L")]
    pub lipschitz: f64,
    pub mu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ridge: Option<f64>,
    #[serde(default)]
    pub x_star: Option<Vec<f64>>,
    #[serde(default)]
    pub f_star: Option<f64>,
}
