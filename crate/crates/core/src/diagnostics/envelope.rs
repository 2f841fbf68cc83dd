use serde::{Deserialize, Serialize};

use crate::solvers::{SolverParams, Variant};

/// `(1 + r)^{−k}`.
fn geometric(r: f64, k: usize) -> f64 {
    (1.0 + r).powf(-(k as f64))
}

/// `scale/(offset + slope·k)²`; every caller has `scale = offset²`.
///
/// The sublinear branches cap `γ0` at `L`: `λ_k` is nonincreasing in `γ0`,
/// and the uncapped closed forms fail for `γ0 ≫ L`.
fn sublinear(scale: f64, offset: f64, slope: f64, k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let d = offset + slope * k as f64;
    scale / (d * d)
}

/// `min{ 8L(2√(2L) + √min{γ0, L}·k)^{−2}, (1 + √(min{γ0, μ}/L))^{−k} }`.
pub fn envelope_explicit(k: usize, lipschitz: f64, mu: f64, gamma0: f64) -> f64 {
    let l = lipschitz;
    let a = sublinear(8.0 * l, 2.0 * (2.0 * l).sqrt(), gamma0.min(l).sqrt(), k);
    let b = geometric((gamma0.min(mu) / l).sqrt(), k);
    a.min(b)
}

/// `min{ 4L(2√L + √(1.5 min{γ0, L})·k)^{−2}, (1 + √(2 min{γ0, μ}/L))^{−k} }`.
pub fn envelope_extra_gradient(k: usize, lipschitz: f64, mu: f64, gamma0: f64) -> f64 {
    let l = lipschitz;
    let a = sublinear(4.0 * l, 2.0 * l.sqrt(), (1.5 * gamma0.min(l)).sqrt(), k);
    let b = geometric((2.0 * gamma0.min(mu) / l).sqrt(), k);
    a.min(b)
}

/// `min{ 32L(4√(2L) + √min{γ0, L}·k)^{−2}, (1 + ½√(min{γ0, μ}/L))^{−k} }`.
pub fn envelope_composite_alt(k: usize, lipschitz: f64, mu: f64, gamma0: f64) -> f64 {
    let l = lipschitz;
    let a = sublinear(32.0 * l, 4.0 * (2.0 * l).sqrt(), gamma0.min(l).sqrt(), k);
    let b = geometric(0.5 * (gamma0.min(mu) / l).sqrt(), k);
    a.min(b)
}

/// `min{ 4L(2√L + √min{γ0, L}·k)^{−2}, (1 + √(min{γ0, μ}/L))^{−k} }`, for
/// `Lα_k² = γ_k(1 + α_k)`.
pub fn envelope_nag_flow(k: usize, lipschitz: f64, mu: f64, gamma0: f64) -> f64 {
    let l = lipschitz;
    let a = sublinear(4.0 * l, 2.0 * l.sqrt(), gamma0.min(l).sqrt(), k);
    let b = geometric((gamma0.min(mu) / l).sqrt(), k);
    a.min(b)
}

/// `min{ 4L(2√L + √min{γ0, L}·k)^{−2}, (1 − √(min{γ0, μ}/L))^{k} }`, for
/// `Lα_k² = γ_{k+1}`.
pub fn envelope_nag_flow_b(k: usize, lipschitz: f64, mu: f64, gamma0: f64) -> f64 {
    let l = lipschitz;
    let a = sublinear(4.0 * l, 2.0 * l.sqrt(), gamma0.min(l).sqrt(), k);
    let r = (gamma0.min(mu) / l).sqrt().min(1.0);
    let b = (1.0 - r).powf(k as f64);
    a.min(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum EnvelopeKind {
    Explicit,
    ExtraGradient,
    /// Same bound as `Explicit`, for the forward-backward split.
    Composite,
    CompositeAlt,
    NagFlow,
    NagFlowB,
    /// `(1 + α)^{−k}` for a constant step size `α`.
    SemiImplicit {
        alpha: f64,
    },
}

/// Closed-form upper bound on `λ_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEnvelope {
    pub kind: EnvelopeKind,
    #[serde(rename = "L")]
    pub lipschitz: f64,
    pub mu: f64,
    pub gamma0: f64,
}

impl RateEnvelope {
    pub fn new(kind: EnvelopeKind, lipschitz: f64, mu: f64, gamma0: f64) -> Self {
        Self {
            kind,
            lipschitz,
            mu,
            gamma0,
        }
    }

    /// The envelope certified for `params.variant`.
    pub fn for_params(params: &SolverParams) -> Self {
        let kind = match params.variant {
            Variant::Explicit => EnvelopeKind::Explicit,
            Variant::ExtraGradient => EnvelopeKind::ExtraGradient,
            Variant::CompositeSplit => EnvelopeKind::Composite,
            Variant::CompositeAlt => EnvelopeKind::CompositeAlt,
            Variant::GradientMapping | Variant::NagFlowA => EnvelopeKind::NagFlow,
            Variant::NagFlowB => EnvelopeKind::NagFlowB,
            Variant::SemiImplicit => EnvelopeKind::SemiImplicit {
                alpha: params.alpha_override.unwrap_or(0.0),
            },
        };
        Self::new(kind, params.lipschitz, params.mu, params.gamma0)
    }

    pub fn value(&self, k: usize) -> f64 {
        let (l, mu, g0) = (self.lipschitz, self.mu, self.gamma0);
        match self.kind {
            EnvelopeKind::Explicit | EnvelopeKind::Composite => envelope_explicit(k, l, mu, g0),
            EnvelopeKind::ExtraGradient => envelope_extra_gradient(k, l, mu, g0),
            EnvelopeKind::CompositeAlt => envelope_composite_alt(k, l, mu, g0),
            EnvelopeKind::NagFlow => envelope_nag_flow(k, l, mu, g0),
            EnvelopeKind::NagFlowB => envelope_nag_flow_b(k, l, mu, g0),
            EnvelopeKind::SemiImplicit { alpha } => geometric(alpha, k),
        }
    }
}
