use serde::{Deserialize, Serialize};

use super::{RateEnvelope, ResidualIndexing, Trace};
use crate::solvers::Variant;

/// Relative tolerance on recurrences that hold exactly up to rounding.
const RECURRENCE_TOL: f64 = 1e-14;
/// Relative tolerance for the residual-sum identity.
const RESIDUAL_TOL: f64 = 1e-12;

/// `1e-12·(1 + max(E_0, 1))`, the additive slack on every certificate
/// inequality.
pub fn epsilon_fp(e0: f64) -> f64 {
    1e-12 * (1.0 + e0.max(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub name: String,
    pub pass: bool,
    /// Iteration with the largest slack; `None` when nothing was checked.
    pub worst_k: Option<usize>,
    /// Largest `lhs − rhs` (or relative deviation for identities). The check
    /// passes when this is at most the allowance.
    pub worst_slack: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub check: String,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub variant: String,
    pub fixture: String,
    pub n_iters: usize,
    pub epsilon_fp: f64,
    pub checks: Vec<CertificateCheck>,
    /// Earliest violating iteration over all checks.
    pub first_violation: Option<Violation>,
}

impl CertificateReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&CertificateCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Accumulator {
    name: &'static str,
    allowance: f64,
    worst: Option<(usize, f64)>,
    first_violation: Option<usize>,
}

impl Accumulator {
    fn new(name: &'static str, allowance: f64) -> Self {
        Self {
            name,
            allowance,
            worst: None,
            first_violation: None,
        }
    }

    fn record(&mut self, k: usize, slack: f64) {
        let violated = !(slack <= self.allowance);
        if violated && self.first_violation.is_none() {
            self.first_violation = Some(k);
        }
        let worse = match self.worst {
            None => true,
            Some((_, w)) => slack > w || (slack.is_nan() && !w.is_nan()),
        };
        if worse {
            self.worst = Some((k, slack));
        }
    }

    fn relative(&mut self, k: usize, value: f64, expected: f64) {
        let scale = expected.abs().max(f64::MIN_POSITIVE);
        self.record(k, (value - expected).abs() / scale);
    }
}

/// Verifies the Lyapunov certificates of `trace` against `envelope`.
///
/// Checks, with `ε = ε_fp(E_0)`:
///
/// * `contraction`: `E_{k+1} ≤ E_k/(1 + α_k) + ε` (`E = L` without a residual
///   sum; `(1 − α_k)` for `nag_flow_b`)
/// * `cumulative`: `L_k ≤ λ_k L_0 + ε`
/// * `envelope`: `L_k ≤ envelope(k) L_0 + ε`
/// * `lambda_recurrence`: `λ_0 = 1` and `λ_{k+1} = λ_k/(1 + α_k)` to 10⁻¹⁴
/// * `gamma_recurrence`: the damping update to 10⁻¹⁴
/// * `gamma_bracket`: `min(γ0, μ) ≤ γ_k ≤ max(γ0, μ)` for `μ > 0`,
///   `γ_k` nonincreasing for `μ = 0`
/// * `lambda_gamma`: `λ_k ≤ (γ_k/γ0)(1 + 10⁻¹²)`
/// * `residual_identity`: recursive `R_k` equals `λ_k Σ_{i<k} c_i/λ_i` to
///   10⁻¹² (variants with a residual sum)
/// * `gradient_decay`: `‖∇f(x_k)‖² ≤ 2L L_0 λ_k + 2Lε` (explicit,
///   extra-gradient, `nag_flow_b`)
/// * `subgradient_sum`: `L_k + (1/4L) Σ_{i<k} (λ_k/λ_i)‖q_{i+1}‖² ≤ λ_k L_0 + ε`
///   (`composite_alt`)
pub fn check_certificates(trace: &Trace, envelope: &RateEnvelope) -> CertificateReport {
    let recs = &trace.records;
    let variant = trace.variant;
    let e0 = recs.first().map_or(0.0, |r| r.energy());
    let l0 = recs.first().map_or(0.0, |r| r.lyapunov);
    let eps = epsilon_fp(e0);
    let (lip, mu, gamma0) = (trace.lipschitz, trace.mu, trace.gamma0);
    let nag_b = variant == Variant::NagFlowB;
    let indexing = ResidualIndexing::for_variant(variant);

    let mut contraction = Accumulator::new("contraction", eps);
    let mut cumulative = Accumulator::new("cumulative", eps);
    let mut env = Accumulator::new("envelope", eps);
    let mut lambda_rec = Accumulator::new("lambda_recurrence", RECURRENCE_TOL);
    let mut gamma_rec = Accumulator::new("gamma_recurrence", RECURRENCE_TOL);
    let mut bracket = Accumulator::new("gamma_bracket", RECURRENCE_TOL);
    let mut lambda_gamma = Accumulator::new("lambda_gamma", 0.0);
    let mut residual = Accumulator::new("residual_identity", RESIDUAL_TOL);
    let mut grad_decay = Accumulator::new("gradient_decay", 2.0 * lip * eps);
    let mut subgrad = Accumulator::new("subgradient_sum", eps);

    let (g_lo, g_hi) = (gamma0.min(mu), gamma0.max(mu));
    let mut direct_sum = 0.0;
    let mut q_sum = 0.0;

    for (k, r) in recs.iter().enumerate() {
        let e = envelope.value(k);
        cumulative.record(k, r.lyapunov - r.lambda * e0);
        env.record(k, r.lyapunov - e * l0);
        lambda_gamma.record(k, r.lambda - r.gamma / gamma0 * (1.0 + 1e-12));
        if nag_b || matches!(variant, Variant::Explicit | Variant::ExtraGradient) {
            grad_decay.record(k, r.grad_norm_sq - 2.0 * lip * l0 * r.lambda);
        }
        if mu > 0.0 {
            let out = ((g_lo - r.gamma) / g_lo).max((r.gamma - g_hi) / g_hi);
            bracket.record(k, out);
        }

        if k == 0 {
            lambda_rec.relative(0, r.lambda, 1.0);
            if indexing != ResidualIndexing::None {
                residual.record(0, r.residual_sum.abs());
            }
            if variant == Variant::CompositeAlt {
                subgrad.record(0, r.lyapunov - r.lambda * l0);
            }
            continue;
        }

        let p = &recs[k - 1];
        let factor = if nag_b {
            1.0 - p.alpha
        } else {
            1.0 / (1.0 + p.alpha)
        };
        contraction.record(k, r.energy() - p.energy() * factor);
        lambda_rec.relative(k, r.lambda, p.lambda * factor);
        if nag_b {
            gamma_rec.relative(k, r.gamma, p.gamma + p.alpha * (mu - p.gamma));
        } else {
            gamma_rec.relative(k, r.gamma * (1.0 + p.alpha), p.gamma + mu * p.alpha);
        }
        if mu == 0.0 {
            bracket.record(k, (r.gamma - p.gamma) / p.gamma);
            if !(r.gamma > 0.0) {
                bracket.record(k, f64::INFINITY);
            }
        }
        if indexing != ResidualIndexing::None {
            direct_sum += trace.residual_increment(k - 1) / p.lambda;
            residual.relative(k, r.residual_sum, r.lambda * direct_sum);
        }
        if variant == Variant::CompositeAlt {
            q_sum += r.grad_norm_sq / p.lambda;
            let lhs = r.lyapunov + r.lambda * q_sum / (4.0 * lip);
            subgrad.record(k, lhs - r.lambda * l0);
        }
    }

    let mut accs = vec![
        contraction,
        cumulative,
        env,
        lambda_rec,
        gamma_rec,
        bracket,
        lambda_gamma,
    ];
    if indexing != ResidualIndexing::None {
        accs.push(residual);
    }
    if nag_b || matches!(variant, Variant::Explicit | Variant::ExtraGradient) {
        accs.push(grad_decay);
    }
    if variant == Variant::CompositeAlt {
        accs.push(subgrad);
    }

    let first_violation = accs
        .iter()
        .filter_map(|a| a.first_violation.map(|k| (k, a.name)))
        .min_by_key(|&(k, _)| k)
        .map(|(k, name)| Violation {
            check: name.to_string(),
            k,
        });
    let checks = accs
        .into_iter()
        .map(|a| CertificateCheck {
            name: a.name.to_string(),
            pass: a.first_violation.is_none(),
            worst_k: a.worst.map(|(k, _)| k),
            worst_slack: a.worst.map_or(0.0, |(_, s)| s),
        })
        .collect();

    CertificateReport {
        variant: variant.as_str().to_string(),
        fixture: trace.fixture.clone(),
        n_iters: trace.n_iters(),
        epsilon_fp: eps,
        checks,
        first_violation,
    }
}
