//! Driving the benchmark runner from a JSON configuration.
//!
//! Equivalent to `hnag run --fixture quadratic --mu 1 --L 100 --variants
//! explicit,extra_gradient,nag_flow_b --gap-tol 1e-9`, with artifacts written
//! to a temporary directory.
//!
//! ```text
//! cargo run --example benchmark_config
//! ```

use hnag::bench::{run_benchmark, RunConfig};

fn main() -> hnag::Result<()> {
    let out = std::env::temp_dir().join("hnag-benchmark-example");
    let config = RunConfig::from_json(&format!(
        r#"{{
            "fixture": "quadratic",
            "mu": 1.0,
            "L": 100.0,
            "variants": ["explicit", "extra_gradient", "nag_flow_b"],
            "gap_tol": 1e-9,
            "max_iter": 5000,
            "seed": 3,
            "out": {:?}
        }}"#,
        out.to_string_lossy()
    ))?;
    let outcome = run_benchmark(&config)?;
    print!("{}", outcome.summary_table());
    println!("artifacts in {}", outcome.out_dir.display());
    std::process::exit(if outcome.success() { 0 } else { 1 });
}
