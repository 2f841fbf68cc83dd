//! Lyapunov accounting over solver traces.
//!
//! For an H-NAG iteration the discrete Lyapunov function is
//! `L_k = f(x_k) − f* + (γ_k/2)‖v_k − x*‖²` and `λ_k = ∏_{i<k} (1 + α_i)^{−1}`.
//! The explicit, extra-gradient and semi-implicit schemes carry a residual sum
//! `R_k` and contract `E_k = L_k + R_k`:
//!
//! ```text
//! R_{k+1} = (R_k + ½ α_k β_k ‖g_k‖²)/(1 + α_k),   E_{k+1} ≤ E_k/(1 + α_k)
//! ```
//!
//! where `g_k = ∇f(x_k)` for the explicit schemes and `g_k = p_{k+1}` for the
//! semi-implicit one. The composite schemes contract `L_k` directly.
//! `nag_flow_b` uses `λ_k = ∏ (1 − α_i)`.

mod certificate;
mod envelope;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::objectives::Vector;
use crate::solvers::{Problem, StopReason, Variant};

pub use certificate::{
    check_certificates, epsilon_fp, CertificateCheck, CertificateReport, Violation,
};
pub use envelope::{
    envelope_composite_alt, envelope_explicit, envelope_extra_gradient, envelope_nag_flow,
    envelope_nag_flow_b, EnvelopeKind, RateEnvelope,
};

/// One row of a [`Trace`], describing iterate `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub k: usize,
    /// `f(x_k) − f*`.
    pub f_gap: f64,
    /// `‖∇f(x_k)‖²` for smooth variants. Composite splits store
    /// `‖∇h(x_k) + p_k‖²`, the semi-implicit scheme `‖p_k‖²`, and
    /// `gradient_mapping` the squared gradient-mapping norm. Rows without an
    /// implicit sub-gradient (`k = 0`) fall back to the stationarity measure.
    pub grad_norm_sq: f64,
    /// Stationarity measure used by the stopping rule (see
    /// [`Problem::stationarity`]).
    pub stationarity: f64,
    pub gamma: f64,
    /// Step sizes of the step leaving iterate `k`.
    pub alpha: f64,
    pub beta: f64,
    pub lyapunov: f64,
    pub residual_sum: f64,
    pub lambda: f64,
}

impl TraceRecord {
    /// `E_k = L_k + R_k`.
    pub fn energy(&self) -> f64 {
        self.lyapunov + self.residual_sum
    }
}

/// Where the residual sum takes its squared gradient from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualIndexing {
    /// `½α_kβ_k‖∇f(x_k)‖²`, read from row `k`.
    Current,
    /// `½α_kβ_k‖p_{k+1}‖²`, read from row `k + 1`.
    Next,
    /// No residual sum; the certificate is on `L_k` alone.
    None,
}

impl ResidualIndexing {
    pub fn for_variant(variant: Variant) -> Self {
        match variant {
            Variant::Explicit | Variant::ExtraGradient => ResidualIndexing::Current,
            Variant::SemiImplicit => ResidualIndexing::Next,
            _ => ResidualIndexing::None,
        }
    }
}

/// Complete record of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub variant: Variant,
    pub fixture: String,
    #[serde(rename = "L")]
    pub lipschitz: f64,
    pub mu: f64,
    pub gamma0: f64,
    pub envelope: RateEnvelope,
    pub stop_reason: StopReason,
    pub records: Vec<TraceRecord>,
}

impl Trace {
    /// Number of completed steps.
    pub fn n_iters(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    pub fn with_fixture(mut self, name: impl Into<String>) -> Self {
        self.fixture = name.into();
        self
    }

    /// Increment `c_k` with `R_{k+1} = (R_k + c_k)/(1 + α_k)`.
    pub fn residual_increment(&self, k: usize) -> f64 {
        let r = &self.records[k];
        let g = match ResidualIndexing::for_variant(self.variant) {
            ResidualIndexing::Current => r.grad_norm_sq,
            ResidualIndexing::Next => self.records[k + 1].grad_norm_sq,
            ResidualIndexing::None => return 0.0,
        };
        0.5 * r.alpha * r.beta * g
    }

    /// CSV with header `k,f_gap,grad_norm_sq,gamma,alpha,lambda,lyapunov,envelope`.
    /// Floats use 17 significant digits so that certificates can be
    /// recomputed exactly from the file.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(
            out,
            "k,f_gap,grad_norm_sq,gamma,alpha,lambda,lyapunov,envelope"
        )?;
        for r in &self.records {
            writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.k,
                r.f_gap,
                r.grad_norm_sq,
                r.gamma,
                r.alpha,
                r.lambda,
                r.lyapunov,
                self.envelope.value(r.k)
            )?;
        }
        Ok(())
    }
}

/// `f(x) − f* + (γ/2)‖v − x*‖²`.
pub fn lyapunov_discrete(x: &Vector, v: &Vector, gamma: f64, problem: Problem<'_>) -> Result<f64> {
    let xs = problem.minimizer().ok_or(Error::MissingMinimizer)?;
    let fs = problem.min_value().ok_or(Error::MissingMinimizer)?;
    Ok(problem.value(x) - fs + 0.5 * gamma * (v - xs).norm_squared())
}

/// `λ_{k+1} = λ_k/(1 + α_k)`.
pub fn lambda_update(lambda: f64, alpha: f64) -> Result<f64> {
    ensure_positive("alpha", alpha)?;
    Ok(lambda / (1.0 + alpha))
}
