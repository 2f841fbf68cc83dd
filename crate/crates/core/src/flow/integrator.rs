use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::Vector;

#[derive(Debug, Clone, Copy)]
pub struct IntegratorOptions {
    /// Number of uniformly spaced output samples, endpoints included.
    pub samples: usize,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            samples: 1001,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Dormand–Prince 5(4) with PI step control and continuous (dense) output.
///
/// Mixed error control: component `i` is scaled by `tol·(1 + max(|y_i|, |ŷ_i|))`.
#[derive(Debug, Clone, Copy)]
pub struct DormandPrince {
    pub tol: f64,
    pub max_steps: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const PI_BETA: f64 = 0.04;
const PI_EXPONENT: f64 = 0.2 - PI_BETA * 0.75;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;

impl DormandPrince {
    pub fn new(tol: f64, max_steps: usize) -> Self {
        Self { tol, max_steps }
    }

    /// Integrates `y' = rhs(t, y)` from `times[0]` to the last entry of
    /// `times` (sorted ascending), returning the solution at every entry.
    pub fn solve<F>(
        &self,
        mut rhs: F,
        y0: &Vector,
        times: &[f64],
    ) -> Result<(Vec<Vector>, IntegrationStats)>
    where
        F: FnMut(f64, &Vector) -> Result<Vector>,
    {
        let mut stats = IntegrationStats::default();
        let Some((&t0, _)) = times.split_first() else {
            return Ok((Vec::new(), stats));
        };
        let t_end = *times.last().unwrap();
        let mut out = Vec::with_capacity(times.len());
        let mut next = 0;
        while next < times.len() && times[next] <= t0 {
            out.push(y0.clone());
            next += 1;
        }
        if next == times.len() {
            return Ok((out, stats));
        }

        let mut eval = |t: f64, y: &Vector, stats: &mut IntegrationStats| {
            stats.evaluations += 1;
            rhs(t, y)
        };

        let span = t_end - t0;
        let min_step = 1e-14 * t_end.abs().max(span);
        let mut t = t0;
        let mut y = y0.clone();
        let mut k1 = eval(t, &y, &mut stats)?;
        let mut h = self.initial_step(&mut eval, t, &y, &k1, span, &mut stats)?;
        let mut fac_old: f64 = 1e-4;
        let mut last_rejected = false;

        loop {
            if stats.accepted + stats.rejected >= self.max_steps {
                return Err(Error::TooManySteps {
                    max_steps: self.max_steps,
                });
            }
            let last = t + 1.01 * h >= t_end;
            if last {
                h = t_end - t;
            }
            if h < min_step {
                return Err(Error::StepUnderflow { t, step: h });
            }

            let y2 = &y + &k1 * (h * A21);
            let k2 = eval(t + C2 * h, &y2, &mut stats)?;
            let y3 = &y + (&k1 * A31 + &k2 * A32) * h;
            let k3 = eval(t + C3 * h, &y3, &mut stats)?;
            let y4 = &y + (&k1 * A41 + &k2 * A42 + &k3 * A43) * h;
            let k4 = eval(t + C4 * h, &y4, &mut stats)?;
            let y5 = &y + (&k1 * A51 + &k2 * A52 + &k3 * A53 + &k4 * A54) * h;
            let k5 = eval(t + C5 * h, &y5, &mut stats)?;
            let y6 = &y + (&k1 * A61 + &k2 * A62 + &k3 * A63 + &k4 * A64 + &k5 * A65) * h;
            let k6 = eval(t + h, &y6, &mut stats)?;
            let y_new = &y + (&k1 * A71 + &k3 * A73 + &k4 * A74 + &k5 * A75 + &k6 * A76) * h;
            let finite = y_new.iter().all(|v| v.is_finite());
            let k7 = if finite {
                eval(t + h, &y_new, &mut stats)?
            } else {
                Vector::zeros(y.len())
            };

            let err_vec = (&k1 * E1 + &k3 * E3 + &k4 * E4 + &k5 * E5 + &k6 * E6 + &k7 * E7) * h;
            let err = if finite {
                self.error_norm(&err_vec, &y, &y_new)
            } else {
                f64::INFINITY
            };

            let fac11 = if err.is_finite() {
                err.powf(PI_EXPONENT)
            } else {
                f64::INFINITY
            };
            if err <= 1.0 {
                let fac = (fac11 / fac_old.powf(PI_BETA) / SAFETY)
                    .clamp(1.0 / MAX_FACTOR, 1.0 / MIN_FACTOR);
                let mut h_new = h / fac;
                if last_rejected {
                    h_new = h_new.min(h);
                }
                fac_old = err.max(1e-4);
                stats.accepted += 1;
                last_rejected = false;

                let t_new = if last { t_end } else { t + h };
                let ydiff = &y_new - &y;
                let bspl = &k1 * h - &ydiff;
                let r4 = &ydiff - &k7 * h - &bspl;
                let r5 = (&k1 * D1 + &k3 * D3 + &k4 * D4 + &k5 * D5 + &k6 * D6 + &k7 * D7) * h;
                while next < times.len() && (times[next] <= t_new || last) {
                    let s = times[next];
                    if s >= t_new {
                        out.push(y_new.clone());
                    } else {
                        let theta = (s - t) / h;
                        let theta1 = 1.0 - theta;
                        let inner = &r4 + &r5 * theta1;
                        let inner = &bspl + inner * theta;
                        let inner = &ydiff + inner * theta1;
                        out.push(&y + inner * theta);
                    }
                    next += 1;
                }
                if last {
                    return Ok((out, stats));
                }
                t = t_new;
                y = y_new;
                k1 = k7;
                h = h_new.min(t_end - t);
            } else {
                let shrink = if fac11.is_finite() {
                    (fac11 / SAFETY).min(1.0 / MIN_FACTOR)
                } else {
                    1.0 / MIN_FACTOR
                };
                h /= shrink;
                stats.rejected += 1;
                last_rejected = true;
            }
        }
    }

    fn error_norm(&self, err: &Vector, y: &Vector, y_new: &Vector) -> f64 {
        let n = err.len().max(1) as f64;
        let sum: f64 = err
            .iter()
            .zip(y.iter().zip(y_new.iter()))
            .map(|(e, (a, b))| {
                let sk = self.tol * (1.0 + a.abs().max(b.abs()));
                (e / sk).powi(2)
            })
            .sum();
        (sum / n).sqrt()
    }

    fn scaled_norm(&self, v: &Vector, y: &Vector) -> f64 {
        let n = v.len().max(1) as f64;
        let sum: f64 = v
            .iter()
            .zip(y.iter())
            .map(|(e, a)| (e / (self.tol * (1.0 + a.abs()))).powi(2))
            .sum();
        (sum / n).sqrt()
    }

    fn initial_step<F>(
        &self,
        eval: &mut F,
        t: f64,
        y: &Vector,
        f0: &Vector,
        span: f64,
        stats: &mut IntegrationStats,
    ) -> Result<f64>
    where
        F: FnMut(f64, &Vector, &mut IntegrationStats) -> Result<Vector>,
    {
        let d0 = self.scaled_norm(y, y);
        let d1 = self.scaled_norm(f0, y);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        let h0 = h0.min(span);
        let y1 = y + f0 * h0;
        let f1 = eval(t + h0, &y1, stats)?;
        let d2 = self.scaled_norm(&(&f1 - f0), y) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        Ok((100.0 * h0).min(h1).min(span))
    }
}
