use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hnag::bench::{parse_config, run_benchmark, run_flow, run_validate, ConfigOverrides};

#[derive(Parser)]
#[command(
    name = "hnag",
    version,
    about = "H-NAG solvers with Lyapunov certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run discrete variants and check their certificates.
    Run(ConfigOverrides),
    /// Integrate the continuous flow and check its decay.
    Flow(ConfigOverrides),
    /// Run the oracle validation battery on a fixture.
    Validate(ConfigOverrides),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(command: Command) -> hnag::Result<bool> {
    match command {
        Command::Run(flags) => {
            let outcome = run_benchmark(&parse_config(&flags)?)?;
            print!("{}", outcome.summary_table());
            Ok(outcome.success())
        }
        Command::Flow(flags) => {
            let outcome = run_flow(&parse_config(&flags)?)?;
            let r = &outcome.report;
            println!(
                "samples {}  L(0) {:.6e}  L(t_end) {:.6e}",
                r.samples, r.initial_lyapunov, r.final_lyapunov
            );
            for c in &r.checks {
                let verdict = if c.pass { "pass" } else { "FAIL" };
                println!(
                    "{:<10} {verdict}  worst slack {:.3e} at t = {:.4}",
                    c.name, c.worst_slack, c.worst_time
                );
            }
            Ok(r.passed())
        }
        Command::Validate(flags) => {
            let outcome = run_validate(&parse_config(&flags)?)?;
            let r = &outcome.report;
            println!("fixture {}  probes {}", outcome.fixture, r.probes);
            println!("gradient_error        {:.3e}", r.gradient_error);
            println!("convexity_violation   {:.3e}", r.convexity_violation);
            println!("upper_bound_violation {:.3e}", r.upper_bound_violation);
            println!("lipschitz_violation   {:.3e}", r.lipschitz_violation);
            if let Some(g) = r.minimizer_gradient_norm {
                println!("grad norm at x*       {g:.3e}");
            }
            println!("{}", if r.passed() { "pass" } else { "FAIL" });
            Ok(r.passed())
        }
    }
}
