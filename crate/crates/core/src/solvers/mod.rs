//! Discrete H-NAG schemes behind one stepping interface.
//!
//! Every step is a pure function `(state, problem, params) → state`. The
//! [`run`] driver iterates a variant, records a [`Trace`](crate::diagnostics::Trace)
//! and applies the stopping rules.
//!
//! | variant | problem | step sizes |
//! |---|---|---|
//! | `explicit` | smooth | `α = √(γ/L)`, `β = 1/(Lα)` |
//! | `extra_gradient` | smooth | `Lα² = γ(2 + α)` |
//! | `semi_implicit` | proximable | any `α > 0`, `β = α/γ` |
//! | `composite_split` | composite | `α = √(γ/L)` |
//! | `composite_alt` | composite | `α = √(γ/(4L))`, `β = 1/(2Lα)` |
//! | `gradient_mapping` | composite | `Lα² = γ(1 + α)` |
//! | `nag_flow_a` | smooth | `Lα² = γ(1 + α)` |
//! | `nag_flow_b` | smooth | `Lα² = γ + α(μ − γ)` |

mod recurrence;
mod run;
mod steps;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};
use crate::objectives::{Composite, Proximable, SmoothObjective, Vector};

pub use recurrence::{three_term_x_recurrence, RecurrenceHistory};
pub use run::{run, StopReason};
pub use steps::{
    step, step_composite_alt, step_composite_split, step_explicit, step_extra_gradient,
    step_gradient_mapping, step_gradient_mapping_shifted, step_nag_flow_a, step_nag_flow_b,
    step_semi_implicit, step_sizes,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Explicit,
    ExtraGradient,
    SemiImplicit,
    CompositeSplit,
    CompositeAlt,
    GradientMapping,
    NagFlowA,
    NagFlowB,
}

impl Variant {
    pub const ALL: [Variant; 8] = [
        Variant::Explicit,
        Variant::ExtraGradient,
        Variant::SemiImplicit,
        Variant::CompositeSplit,
        Variant::CompositeAlt,
        Variant::GradientMapping,
        Variant::NagFlowA,
        Variant::NagFlowB,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Explicit => "explicit",
            Variant::ExtraGradient => "extra_gradient",
            Variant::SemiImplicit => "semi_implicit",
            Variant::CompositeSplit => "composite_split",
            Variant::CompositeAlt => "composite_alt",
            Variant::GradientMapping => "gradient_mapping",
            Variant::NagFlowA => "nag_flow_a",
            Variant::NagFlowB => "nag_flow_b",
        }
    }

    /// Kind of problem the variant runs on.
    pub fn problem_kind(self) -> ProblemKind {
        match self {
            Variant::Explicit | Variant::ExtraGradient | Variant::NagFlowA | Variant::NagFlowB => {
                ProblemKind::Smooth
            }
            Variant::SemiImplicit => ProblemKind::Proximal,
            Variant::CompositeSplit | Variant::CompositeAlt | Variant::GradientMapping => {
                ProblemKind::Composite
            }
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str() == s.trim())
            .ok_or_else(|| {
                let names: Vec<_> = Variant::ALL.iter().map(|v| v.as_str()).collect();
                Error::Config(format!(
                    "unknown variant `{s}`; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Smooth,
    Composite,
    Proximal,
}

impl ProblemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::Smooth => "smooth",
            ProblemKind::Composite => "composite",
            ProblemKind::Proximal => "proximable",
        }
    }
}

/// The objective as seen by a solver.
#[derive(Debug, Clone, Copy)]
pub enum Problem<'a> {
    Smooth(&'a dyn SmoothObjective),
    Composite(&'a Composite),
    /// An objective with a closed-form proximal map of the whole `f`.
    Proximal(&'a dyn Proximable),
}

impl<'a> Problem<'a> {
    pub fn kind(&self) -> ProblemKind {
        match self {
            Problem::Smooth(_) => ProblemKind::Smooth,
            Problem::Composite(_) => ProblemKind::Composite,
            Problem::Proximal(_) => ProblemKind::Proximal,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Problem::Smooth(f) => f.dim(),
            Problem::Composite(c) => c.dim(),
            Problem::Proximal(p) => p.dim(),
        }
    }

    pub fn value(&self, x: &Vector) -> f64 {
        match self {
            Problem::Smooth(f) => f.value(x),
            Problem::Composite(c) => c.value(x),
            Problem::Proximal(p) => p.value(x),
        }
    }

    pub fn minimizer(&self) -> Option<&'a Vector> {
        match self {
            Problem::Smooth(f) => f.minimizer(),
            Problem::Composite(c) => c.minimizer(),
            Problem::Proximal(p) => p.minimizer(),
        }
    }

    pub fn min_value(&self) -> Option<f64> {
        match self {
            Problem::Smooth(f) => f.min_value(),
            Problem::Composite(c) => c.min_value(),
            Problem::Proximal(p) => p.min_value(),
        }
    }

    /// Stationarity measure: `‖∇f(x)‖`, the gradient-mapping norm for
    /// composite problems, or `‖x − prox_f(x)‖` for proximable ones.
    pub fn stationarity(&self, x: &Vector) -> f64 {
        match self {
            Problem::Smooth(f) => f.gradient(x).norm(),
            Problem::Composite(c) => c.gradient_mapping(x).norm(),
            Problem::Proximal(p) => (x - p.prox(x, 1.0)).norm(),
        }
    }

    fn require(&self, variant: Variant) -> Result<()> {
        if self.kind() == variant.problem_kind() {
            Ok(())
        } else {
            Err(Error::IncompatibleVariant {
                variant: variant.as_str(),
                problem: self.kind().as_str(),
            })
        }
    }
}

/// Parameters of a run. Construct with [`SolverParams::new`] and adjust with
/// the `with_*` builders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    pub variant: Variant,
    pub gamma0: f64,
    pub mu: f64,
    #[serde(rename = "L")]
    pub lipschitz: f64,
    /// Fixed step size; required by, and only accepted for, `semi_implicit`.
    pub alpha_override: Option<f64>,
    pub max_iter: usize,
    /// Stop once the stationarity measure is at most this value.
    pub stop_grad_tol: f64,
    /// Stop once the Lyapunov value is at most this value.
    pub stop_gap_tol: f64,
}

impl SolverParams {
    /// Defaults: 1000 iterations, both tolerances zero (stop only at exact
    /// stationarity).
    pub fn new(variant: Variant, gamma0: f64, mu: f64, lipschitz: f64) -> Self {
        Self {
            variant,
            gamma0,
            mu,
            lipschitz,
            alpha_override: None,
            max_iter: 1000,
            stop_grad_tol: 0.0,
            stop_gap_tol: 0.0,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha_override = Some(alpha);
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_grad_tol(mut self, tol: f64) -> Self {
        self.stop_grad_tol = tol;
        self
    }

    pub fn with_gap_tol(mut self, tol: f64) -> Self {
        self.stop_gap_tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("gamma0", self.gamma0)?;
        ensure_nonnegative("mu", self.mu)?;
        ensure_positive("L", self.lipschitz)?;
        ensure_nonnegative("grad_tol", self.stop_grad_tol)?;
        ensure_nonnegative("gap_tol", self.stop_gap_tol)?;
        match (self.variant, self.alpha_override) {
            (Variant::SemiImplicit, None) => {
                return Err(Error::MissingParameter {
                    variant: "semi_implicit",
                    what: "a step size (alpha)",
                })
            }
            (Variant::SemiImplicit, Some(a)) => ensure_positive("alpha", a)?,
            (v, Some(_)) => {
                return Err(Error::Config(format!(
                    "alpha is only accepted by semi_implicit, not by {v}"
                )))
            }
            _ => {}
        }
        if self.variant == Variant::NagFlowB && self.mu > self.lipschitz {
            return Err(Error::Config(format!(
                "nag_flow_b requires mu <= L, got mu = {} and L = {}",
                self.mu, self.lipschitz
            )));
        }
        Ok(())
    }
}

/// Iterate `(x_k, v_k, γ_k)` plus cached quantities from the last step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverState {
    pub x: Vector,
    pub v: Vector,
    pub gamma: f64,
    pub k: usize,
    /// `∇f(x_k)` (`∇h(x_k)` for composite problems) when the last step
    /// produced it.
    pub last_grad: Option<Vector>,
    /// The element `p_k` of `∂f(x_k)` (`∂g(x_k)` for composite splits)
    /// produced by implicit steps.
    pub subgradient: Option<Vector>,
    pub last_alpha: Option<f64>,
    pub last_beta: Option<f64>,
}

impl SolverState {
    pub fn new(x0: Vector, v0: Vector, gamma0: f64) -> Result<Self> {
        if x0.len() != v0.len() {
            return Err(Error::DimensionMismatch {
                expected: x0.len(),
                got: v0.len(),
            });
        }
        ensure_positive("gamma0", gamma0)?;
        Ok(Self {
            x: x0,
            v: v0,
            gamma: gamma0,
            k: 0,
            last_grad: None,
            subgradient: None,
            last_alpha: None,
            last_beta: None,
        })
    }

    pub(crate) fn is_finite(&self) -> bool {
        self.gamma.is_finite()
            && self.x.iter().all(|v| v.is_finite())
            && self.v.iter().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variant_names_round_trip() {
        for v in Variant::ALL {
            assert_eq!(v.as_str().parse::<Variant>().unwrap(), v);
            assert_eq!(serde_json::to_string(&v).unwrap(), format!("\"{v}\""));
        }
        assert!("nesterov".parse::<Variant>().is_err());
    }

    #[test]
    fn parameter_validation() {
        assert!(SolverParams::new(Variant::Explicit, 1.0, 0.0, 1.0)
            .validate()
            .is_ok());
        assert!(SolverParams::new(Variant::Explicit, 0.0, 0.0, 1.0)
            .validate()
            .is_err());
        assert!(SolverParams::new(Variant::Explicit, 1.0, -1.0, 1.0)
            .validate()
            .is_err());
        assert!(SolverParams::new(Variant::Explicit, 1.0, 0.0, 0.0)
            .validate()
            .is_err());
        assert!(matches!(
            SolverParams::new(Variant::SemiImplicit, 1.0, 0.0, 1.0).validate(),
            Err(Error::MissingParameter { .. })
        ));
        assert!(SolverParams::new(Variant::SemiImplicit, 1.0, 0.0, 1.0)
            .with_alpha(10.0)
            .validate()
            .is_ok());
        assert!(SolverParams::new(Variant::Explicit, 1.0, 0.0, 1.0)
            .with_alpha(1.0)
            .validate()
            .is_err());
        assert!(SolverParams::new(Variant::NagFlowB, 1.0, 2.0, 1.0)
            .validate()
            .is_err());
    }

    #[test]
    fn state_rejects_bad_input() {
        assert!(SolverState::new(Vector::zeros(2), Vector::zeros(3), 1.0).is_err());
        assert!(SolverState::new(Vector::zeros(2), Vector::zeros(2), 0.0).is_err());
    }
}
