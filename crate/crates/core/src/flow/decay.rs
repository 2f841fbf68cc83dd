use serde::{Deserialize, Serialize};

use super::{lyapunov_continuous, FlowParams, Trajectory};
use crate::error::{Error, Result};

/// Outcome of one continuous-time certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayCheck {
    pub name: String,
    pub pass: bool,
    /// Sample time with the largest normalized slack.
    pub worst_time: f64,
    /// `max (lhs − rhs) / scale`; non-positive when the bound holds with no
    /// numerical allowance.
    pub worst_slack: f64,
    pub allowance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub samples: usize,
    pub tolerance: f64,
    /// Relative numerical allowance, `100·tol`.
    pub epsilon: f64,
    pub initial_lyapunov: f64,
    pub final_lyapunov: f64,
    pub checks: Vec<DecayCheck>,
}

impl DecayReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&DecayCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

const ROUNDING_FLOOR: f64 = 1e-12;

struct Tracker {
    name: &'static str,
    allowance: f64,
    worst_time: f64,
    worst_slack: f64,
}

impl Tracker {
    fn new(name: &'static str, allowance: f64) -> Self {
        Self {
            name,
            allowance,
            worst_time: 0.0,
            worst_slack: f64::NEG_INFINITY,
        }
    }

    fn record(&mut self, t: f64, slack: f64) {
        if slack > self.worst_slack || slack.is_nan() {
            self.worst_slack = slack;
            self.worst_time = t;
        }
    }

    fn finish(self) -> DecayCheck {
        DecayCheck {
            name: self.name.to_string(),
            pass: self.worst_slack <= self.allowance,
            worst_time: self.worst_time,
            worst_slack: if self.worst_slack.is_finite() || self.worst_slack.is_nan() {
                self.worst_slack
            } else {
                0.0
            },
            allowance: self.allowance,
        }
    }
}

/// Checks, at every sample of `traj` with `ε = 100·tol`:
///
/// * `pointwise`: `L(t) ≤ e^{−t} L(0) (1 + ε)`
/// * `integral`: `L(t) + ∫₀ᵗ e^{s−t} [β‖∇f‖² + (μ/2)‖x − v‖²] ds ≤ e^{−t} L(0) (1 + ε)`
/// * `stepwise`: `L(t_{i+1}) ≤ e^{−Δt} L(t_i) (1 + ε)`
/// * `gamma`: `|γ(t) − μ − (γ₀ − μ)e^{−t}| ≤ ε max(γ₀, μ)`, which places γ
///   between `γ₀` and `μ`
///
/// Slacks are normalized by `L(0)` (by `max(γ₀, μ)` for `gamma`). The three
/// Lyapunov checks also allow `10⁻¹²(1 + |f*|)` absolute, the rounding floor
/// of evaluating `L` near the minimizer. The dissipation integral is the one
/// carried by the trajectory.
pub fn verify_continuous_decay(traj: &Trajectory, params: &FlowParams<'_>) -> Result<DecayReport> {
    if traj.len() < 3 {
        return Err(Error::Config(format!(
            "decay verification needs at least 3 samples, got {}",
            traj.len()
        )));
    }
    let f = params.objective;
    let eps = 100.0 * traj.tolerance;
    let mu = params.mu;
    let lyap: Vec<f64> = traj
        .states
        .iter()
        .map(|s| lyapunov_continuous(s, f))
        .collect::<Result<_>>()?;
    let l0 = lyap[0];
    let scale = if l0 > 0.0 { l0 } else { 1.0 };
    let gamma0 = traj.states[0].gamma;

    let floor = ROUNDING_FLOOR * (1.0 + f.min_value().unwrap_or(0.0).abs()) / scale;
    let mut pointwise = Tracker::new("pointwise", floor);
    let mut dissipation = Tracker::new("integral", floor);
    let mut stepwise = Tracker::new("stepwise", floor);
    let mut gamma = Tracker::new("gamma", eps);
    let gamma_scale = gamma0.max(mu);

    for (i, (&t, s)) in traj.times.iter().zip(&traj.states).enumerate() {
        let decay = (-t).exp();
        let bound = decay * l0 * (1.0 + eps);
        pointwise.record(t, (lyap[i] - bound) / scale);
        dissipation.record(t, (lyap[i] + traj.dissipation[i] - bound) / scale);
        if i > 0 {
            let dt = t - traj.times[i - 1];
            let prev = (-dt).exp() * lyap[i - 1] * (1.0 + eps);
            stepwise.record(t, (lyap[i] - prev) / scale);
        }
        let exact = mu + (gamma0 - mu) * decay;
        gamma.record(t, (s.gamma - exact).abs() / gamma_scale);
    }

    Ok(DecayReport {
        samples: traj.len(),
        tolerance: traj.tolerance,
        epsilon: eps,
        initial_lyapunov: l0,
        final_lyapunov: *lyap.last().unwrap(),
        checks: vec![
            pointwise.finish(),
            dissipation.finish(),
            stepwise.finish(),
            gamma.finish(),
        ],
    })
}
