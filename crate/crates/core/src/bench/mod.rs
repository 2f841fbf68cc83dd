//! Configuration-driven benchmark runner behind the `hnag` binary.
//!
//! A [`RunConfig`] names a fixture and a list of variants. [`run_benchmark`]
//! writes one `trace_<variant>.csv` and one `certificate_<variant>.json` per
//! variant, [`run_flow`] writes `flow.csv` and `decay_report.json`, and
//! [`run_validate`] writes `validation.json`. Identical configurations
//! produce byte-identical files.

mod config;
mod runner;

pub use config::{output_dir, parse_config, ConfigOverrides, Format, RunConfig, Start};
pub use runner::{
    build_fixture, initial_point, run_benchmark, run_flow, run_validate, BenchOutcome,
    BuiltFixture, FlowOutcome, Status, ValidateOutcome, VariantSummary,
};
