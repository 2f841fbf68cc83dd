use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::config::{output_dir, Format, RunConfig, Start};
use crate::diagnostics::{check_certificates, CertificateReport, RateEnvelope};
use crate::error::{Error, Result};
use crate::flow::{
    integrate_flow, verify_continuous_decay, BetaSchedule, DecayReport, FlowParams, FlowState,
};
use crate::objectives::{
    random_lasso_fixture, random_logistic, random_quadratic, validate_objective, Fixture,
    FixtureDocument, ValidationReport, Vector,
};
use crate::solvers::{run, Problem, ProblemKind, SolverParams, StopReason, Variant};

/// A fixture together with the `(μ, L)` declared to the solvers.
#[derive(Debug, Clone)]
pub struct BuiltFixture {
    pub name: String,
    pub fixture: Fixture,
    pub mu: f64,
    pub lipschitz: f64,
}

impl BuiltFixture {
    fn minimizer(&self) -> Result<Vector> {
        let x = match &self.fixture {
            Fixture::Lasso { problem, .. } => problem.minimizer().cloned(),
            other => other.smooth().minimizer().cloned(),
        };
        x.ok_or(Error::MissingMinimizer)
    }
}

/// Builds the fixture named by `config.fixture`.
///
/// Built-in quadratics take `mu` and `L` as their spectrum bounds (defaults
/// 1 and 100). The built-in logistic problem uses `mu` as its ridge weight
/// (default 0.01). Everywhere else `mu` and `L` override the declared
/// constants.
pub fn build_fixture(config: &RunConfig) -> Result<BuiltFixture> {
    let seed = config.seed;
    let (fixture, name) = match config.fixture.as_str() {
        "quadratic" => {
            let mu = config.mu.unwrap_or(1.0);
            let l = config.lipschitz.unwrap_or(100.0);
            if mu > l {
                return Err(Error::Config(format!("mu = {mu} exceeds L = {l}")));
            }
            let q = random_quadratic(config.dim.unwrap_or(10), mu, l, seed)?;
            return Ok(BuiltFixture {
                name: "quadratic".into(),
                fixture: Fixture::Quadratic(q),
                mu,
                lipschitz: l,
            });
        }
        "logistic" => {
            let dim = config.dim.unwrap_or(5);
            let ridge = config.mu.unwrap_or(0.01);
            let f = random_logistic(12 * dim, dim, ridge, seed)?;
            (Fixture::Logistic(f), "logistic".to_string())
        }
        "lasso" => {
            let cols = config.dim.unwrap_or(10);
            let fixture = random_lasso_fixture(2 * cols, cols, 0.5, seed)?;
            (fixture, "lasso".to_string())
        }
        path => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: PathBuf::from(path),
                source,
            })?;
            let doc: FixtureDocument = serde_json::from_str(&text)?;
            let name = Path::new(path)
                .file_stem()
                .map_or_else(|| path.to_string(), |s| s.to_string_lossy().into_owned());
            (Fixture::from_document(&doc)?, name)
        }
    };
    let (mu0, l0) = match &fixture {
        Fixture::Lasso { problem, .. } => (problem.strong_convexity(), problem.lipschitz()),
        other => {
            let s = other.smooth();
            (s.strong_convexity(), s.lipschitz())
        }
    };
    let mu = if config.fixture == "logistic" {
        mu0
    } else {
        config.mu.unwrap_or(mu0)
    };
    Ok(BuiltFixture {
        name,
        fixture,
        mu,
        lipschitz: config.lipschitz.unwrap_or(l0),
    })
}

/// `(x0, v0)` as selected by `config.start`.
pub fn initial_point(config: &RunConfig, fixture: &BuiltFixture) -> Result<(Vector, Vector)> {
    let xs = fixture.minimizer()?;
    let x0 = match config.start {
        Start::Equilibrium => xs,
        Start::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed);
            let n = xs.len();
            xs + Vector::from_iterator(n, (0..n).map(|_| StandardNormal.sample(&mut rng)))
        }
    };
    Ok((x0.clone(), x0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Diverged,
}

/// One line of the benchmark summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantSummary {
    pub variant: Variant,
    pub iters: usize,
    pub final_gap: f64,
    pub stop_reason: Option<StopReason>,
    pub status: Status,
}

#[derive(Debug, Clone)]
pub struct BenchOutcome {
    pub fixture: String,
    pub out_dir: PathBuf,
    pub summaries: Vec<VariantSummary>,
    pub reports: Vec<CertificateReport>,
}

impl BenchOutcome {
    /// True iff every certificate passed and no run diverged.
    pub fn success(&self) -> bool {
        self.summaries.iter().all(|s| s.status == Status::Pass)
    }

    pub fn summary_table(&self) -> String {
        let mut s = format!(
            "{:<16} {:>8} {:>24} {:>12} {:>8}\n",
            "variant", "iters", "final_gap", "stop", "result"
        );
        for r in &self.summaries {
            let stop = match r.stop_reason {
                Some(StopReason::Stationary) => "stationary",
                Some(StopReason::GapTolerance) => "gap_tol",
                Some(StopReason::MaxIter) => "max_iter",
                None => "-",
            };
            let result = match r.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Diverged => "DIVERGED",
            };
            let _ = writeln!(
                s,
                "{:<16} {:>8} {:>24.16e} {:>12} {:>8}",
                r.variant.as_str(),
                r.iters,
                r.final_gap,
                stop,
                result
            );
        }
        s
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn io_at(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(io_at(path))
}

fn prepare_dir(config: &RunConfig) -> Result<PathBuf> {
    let dir = output_dir(config);
    std::fs::create_dir_all(&dir).map_err(io_at(&dir))?;
    Ok(dir)
}

/// Runs every configured variant, writing `trace_<variant>.csv` and
/// `certificate_<variant>.json` into the output directory.
///
/// A diverged run is reported in the summary rather than returned as an
/// error. Incompatible variant/fixture pairs are errors.
pub fn run_benchmark(config: &RunConfig) -> Result<BenchOutcome> {
    config.validate()?;
    let built = build_fixture(config)?;
    let dir = prepare_dir(config)?;
    let (x0, v0) = initial_point(config, &built)?;
    let composite = built.fixture.composite();
    let smooth = built.fixture.smooth();

    let mut summaries = Vec::new();
    let mut reports = Vec::new();
    for &variant in &config.variants {
        let problem = match (variant.problem_kind(), &built.fixture) {
            (ProblemKind::Composite, _) => Problem::Composite(&composite),
            (ProblemKind::Smooth, Fixture::Lasso { .. }) => {
                return Err(Error::IncompatibleVariant {
                    variant: variant.as_str(),
                    problem: "composite",
                })
            }
            (ProblemKind::Smooth, _) => Problem::Smooth(smooth.as_ref()),
            (ProblemKind::Proximal, Fixture::Quadratic(q)) => Problem::Proximal(q),
            (ProblemKind::Proximal, other) => {
                return Err(Error::IncompatibleVariant {
                    variant: variant.as_str(),
                    problem: other.kind(),
                })
            }
        };
        let mut params = SolverParams::new(variant, config.gamma0, built.mu, built.lipschitz)
            .with_max_iter(config.max_iter)
            .with_grad_tol(config.grad_tol)
            .with_gap_tol(config.gap_tol);
        if variant == Variant::SemiImplicit {
            params = params.with_alpha(config.alpha.expect("validated"));
        }

        let trace = match run(&x0, &v0, problem, &params) {
            Ok((_, trace)) => trace.with_fixture(built.name.clone()),
            Err(Error::Diverged { iteration }) => {
                summaries.push(VariantSummary {
                    variant,
                    iters: iteration,
                    final_gap: f64::NAN,
                    stop_reason: None,
                    status: Status::Diverged,
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        let report = check_certificates(&trace, &RateEnvelope::for_params(&params));

        if config.format.contains(&Format::Csv) {
            let path = dir.join(format!("trace_{variant}.csv"));
            let mut w = create(&path)?;
            trace.write_csv(&mut w).map_err(io_at(&path))?;
            std::io::Write::flush(&mut w).map_err(io_at(&path))?;
        }
        if config.format.contains(&Format::Json) {
            write_json(&dir.join(format!("certificate_{variant}.json")), &report)?;
        }
        summaries.push(VariantSummary {
            variant,
            iters: trace.n_iters(),
            final_gap: trace.last().map_or(f64::NAN, |r| r.f_gap),
            stop_reason: Some(trace.stop_reason),
            status: if report.passed() {
                Status::Pass
            } else {
                Status::Fail
            },
        });
        reports.push(report);
    }

    Ok(BenchOutcome {
        fixture: built.name,
        out_dir: dir,
        summaries,
        reports,
    })
}

#[derive(Debug, Clone)]
pub struct FlowOutcome {
    pub out_dir: PathBuf,
    pub report: DecayReport,
}

/// Integrates the flow on a smooth fixture from `(x0, v0, gamma0)` and writes
/// `flow.csv` and `decay_report.json`.
pub fn run_flow(config: &RunConfig) -> Result<FlowOutcome> {
    config.validate()?;
    let built = build_fixture(config)?;
    if matches!(built.fixture, Fixture::Lasso { .. }) {
        return Err(Error::Config("flow requires a smooth fixture".into()));
    }
    let dir = prepare_dir(config)?;
    let (x0, v0) = initial_point(config, &built)?;
    let smooth = built.fixture.smooth();
    let beta = config.beta.map_or_else(
        || BetaSchedule::matching_explicit_scheme(built.lipschitz, config.gamma0),
        BetaSchedule::Constant,
    );
    let params = FlowParams::new(smooth.as_ref(), built.mu, beta)?;
    let initial = FlowState::new(x0, v0, config.gamma0)?;
    let traj = integrate_flow(&initial, &params, config.t_end, config.flow_tol)?;
    let report = verify_continuous_decay(&traj, &params)?;

    if config.format.contains(&Format::Csv) {
        let path = dir.join("flow.csv");
        let mut w = create(&path)?;
        traj.write_csv(smooth.as_ref(), &mut w)?;
        std::io::Write::flush(&mut w).map_err(io_at(&path))?;
    }
    if config.format.contains(&Format::Json) {
        write_json(&dir.join("decay_report.json"), &report)?;
    }
    Ok(FlowOutcome {
        out_dir: dir,
        report,
    })
}

#[derive(Debug, Clone)]
pub struct ValidateOutcome {
    pub fixture: String,
    pub out_dir: PathBuf,
    pub report: ValidationReport,
}

/// Runs the oracle battery on the (smooth part of the) fixture and writes
/// `validation.json`.
pub fn run_validate(config: &RunConfig) -> Result<ValidateOutcome> {
    config.validate()?;
    let built = build_fixture(config)?;
    let dir = prepare_dir(config)?;
    let report = validate_objective(built.fixture.smooth().as_ref(), config.probes, config.seed);
    if config.format.contains(&Format::Json) {
        write_json(&dir.join("validation.json"), &report)?;
    }
    Ok(ValidateOutcome {
        fixture: built.name,
        out_dir: dir,
        report,
    })
}
