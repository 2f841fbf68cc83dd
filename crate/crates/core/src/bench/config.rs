use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::solvers::Variant;

/// Output artifacts selectable with `format`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Initial point of every run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Start {
    /// `x0 = x* + ξ` with a seeded standard normal `ξ`, and `v0 = x0`.
    #[default]
    Random,
    /// `x0 = v0 = x*`.
    Equilibrium,
}

/// A validated benchmark configuration.
///
/// JSON keys and command-line flags correspond one to one (`max_iter` is
/// `--max-iter`, `L` is `--L`). Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// `quadratic`, `logistic`, `lasso`, or a path to a fixture JSON file.
    pub fixture: String,
    /// Problem size for the built-in fixtures.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// Spectrum of the built-in quadratic, ridge of the built-in logistic
    /// problem, and the declared `μ` otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<f64>,
    #[serde(default = "defaults::gamma0")]
    pub gamma0: f64,
    #[serde(default = "defaults::variants")]
    pub variants: Vec<Variant>,
    /// Step size of `semi_implicit`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default = "defaults::max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub grad_tol: f64,
    #[serde(default)]
    pub gap_tol: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default = "defaults::format")]
    pub format: Vec<Format>,
    #[serde(default)]
    pub start: Start,
    #[serde(default = "defaults::t_end")]
    pub t_end: f64,
    #[serde(default = "defaults::flow_tol")]
    pub flow_tol: f64,
    /// Constant Hessian damping of the flow; defaults to `1/√(Lγ0)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Probe pairs of the validation battery.
    #[serde(default = "defaults::probes")]
    pub probes: usize,
}

mod defaults {
    use super::{Format, Variant};

    pub fn gamma0() -> f64 {
        1.0
    }
    pub fn variants() -> Vec<Variant> {
        vec![Variant::Explicit]
    }
    pub fn max_iter() -> usize {
        1000
    }
    pub fn format() -> Vec<Format> {
        vec![Format::Csv, Format::Json]
    }
    pub fn t_end() -> f64 {
        5.0
    }
    pub fn flow_tol() -> f64 {
        1e-8
    }
    pub fn probes() -> usize {
        100
    }
}

impl RunConfig {
    /// Parses a JSON document under the same rules as [`parse_config`].
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        let Value::Object(map) = value else {
            return Err(Error::Config("configuration must be a JSON object".into()));
        };
        from_map(map)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("RunConfig serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.fixture.trim().is_empty() {
            return bad("fixture required".into());
        }
        if self.variants.is_empty() {
            return bad("`variants` must name at least one variant".into());
        }
        if self.format.is_empty() {
            return bad("`format` must contain csv, json, or both".into());
        }
        if self.dim == Some(0) {
            return bad("`dim` must be positive".into());
        }
        if let Some(mu) = self.mu {
            if !(mu >= 0.0 && mu.is_finite()) {
                return bad(format!("`mu` must be nonnegative, got {mu}"));
            }
        }
        for (key, value) in [
            ("L", self.lipschitz),
            ("alpha", self.alpha),
            ("gamma0", Some(self.gamma0)),
            ("t_end", Some(self.t_end)),
        ] {
            if let Some(v) = value {
                if !(v > 0.0 && v.is_finite()) {
                    return bad(format!("`{key}` must be positive, got {v}"));
                }
            }
        }
        for (key, v) in [("grad_tol", self.grad_tol), ("gap_tol", self.gap_tol)] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("`{key}` must be nonnegative, got {v}"));
            }
        }
        if let Some(b) = self.beta {
            if !(b >= 0.0 && b.is_finite()) {
                return bad(format!("`beta` must be nonnegative, got {b}"));
            }
        }
        if self.variants.contains(&Variant::SemiImplicit) && self.alpha.is_none() {
            return bad("`semi_implicit` requires `alpha`".into());
        }
        Ok(())
    }
}

/// Command-line overrides. Every flag mirrors the JSON key of the same name.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigOverrides {
    /// JSON configuration file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// quadratic, logistic, lasso, or a fixture JSON path.
    #[arg(long)]
    pub fixture: Option<String>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long = "L")]
    pub lipschitz: Option<f64>,
    #[arg(long)]
    pub gamma0: Option<f64>,
    /// Comma-separated variant names.
    #[arg(long, value_delimiter = ',')]
    pub variants: Option<Vec<Variant>>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub grad_tol: Option<f64>,
    #[arg(long)]
    pub gap_tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (default: $HNAG_OUT_DIR, then `hnag-out`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated subset of csv,json.
    #[arg(long, value_delimiter = ',')]
    pub format: Option<Vec<String>>,
    /// random or equilibrium.
    #[arg(long)]
    pub start: Option<String>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub flow_tol: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub probes: Option<usize>,
}

impl ConfigOverrides {
    fn apply(&self, map: &mut Map<String, Value>) {
        let mut set = |key: &str, value: Option<Value>| {
            if let Some(v) = value {
                map.insert(key.to_string(), v);
            }
        };
        set("fixture", self.fixture.clone().map(Value::from));
        set("dim", self.dim.map(Value::from));
        set("mu", self.mu.map(Value::from));
        set("L", self.lipschitz.map(Value::from));
        set("gamma0", self.gamma0.map(Value::from));
        set(
            "variants",
            self.variants
                .as_ref()
                .map(|vs| vs.iter().map(|v| Value::from(v.as_str())).collect()),
        );
        set("alpha", self.alpha.map(Value::from));
        set("max_iter", self.max_iter.map(Value::from));
        set("grad_tol", self.grad_tol.map(Value::from));
        set("gap_tol", self.gap_tol.map(Value::from));
        set("seed", self.seed.map(Value::from));
        set(
            "out",
            self.out
                .as_ref()
                .map(|p| Value::from(p.to_string_lossy().into_owned())),
        );
        set(
            "format",
            self.format
                .as_ref()
                .map(|fs| fs.iter().map(|f| Value::from(f.as_str())).collect()),
        );
        set("start", self.start.clone().map(Value::from));
        set("t_end", self.t_end.map(Value::from));
        set("flow_tol", self.flow_tol.map(Value::from));
        set("beta", self.beta.map(Value::from));
        set("probes", self.probes.map(Value::from));
    }
}

/// Builds a [`RunConfig`] from an optional JSON file and command-line flags.
///
/// Flags override file values. A missing fixture fails with
/// `"fixture required"`; unknown keys and malformed values fail with a
/// message naming the key.
pub fn parse_config(overrides: &ConfigOverrides) -> Result<RunConfig> {
    let mut map = match &overrides.config {
        Some(path) => read_object(path)?,
        None => Map::new(),
    };
    overrides.apply(&mut map);
    from_map(map)
}

fn read_object(path: &Path) -> Result<Map<String, Value>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    match serde_json::from_str(&text)? {
        Value::Object(map) => Ok(map),
        _ => Err(Error::Config(format!(
            "{}: configuration must be a JSON object",
            path.display()
        ))),
    }
}

fn from_map(map: Map<String, Value>) -> Result<RunConfig> {
    if !map.contains_key("fixture") {
        return Err(Error::Config("fixture required".into()));
    }
    let config: RunConfig =
        serde_json::from_value(Value::Object(map)).map_err(|e| Error::Config(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

/// Output directory: `config.out`, then `$HNAG_OUT_DIR`, then `hnag-out`.
pub fn output_dir(config: &RunConfig) -> PathBuf {
    config
        .out
        .clone()
        .or_else(|| std::env::var_os("HNAG_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("hnag-out"))
}
