use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use esl_cli::{dwell, simulate, verify};

/// Multi-robot queue allocation: simulation, exact verification and cyclic
/// dwell selection.
#[derive(Parser)]
#[command(name = "esl", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a policy comparison grid and write results.csv, results.json and figdata/.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the base seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the discount factor.
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Check ESL against exact Q-values and run the coupling suites.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tabulate the cyclic dwell objective.
    Dwell {
        #[arg(long)]
        p: f64,
        /// Locations per robot.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        max: u32,
    },
}

/// Thread count from `ESL_THREADS`, if set.
fn configure_threads() -> Result<()> {
    if let Ok(raw) = std::env::var("ESL_THREADS") {
        let threads: usize = raw
            .trim()
            .parse()
            .with_context(|| format!("ESL_THREADS must be a positive integer, got {raw:?}"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("cannot configure the thread pool")?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    configure_threads()?;
    match cli.command {
        Command::Simulate {
            config,
            out,
            seed,
            beta,
        } => {
            let results = simulate::run(&simulate::SimulateArgs {
                config: &config,
                out: &out,
                seed,
                beta,
            })?;
            for r in &results {
                let s = &r.summary;
                println!(
                    "N={} M={} alpha={} {:<6} cost {:.4} ± {:.4}  mean_q {:.4}  serve {:.4} switch {:.4} idle {:.4}",
                    r.num_locations,
                    r.num_robots,
                    r.alpha.map_or("-".into(), |a| a.to_string()),
                    r.policy.name(),
                    s.discounted_cost.mean,
                    s.discounted_cost.ci,
                    s.mean_queue_length.mean,
                    s.serve.mean,
                    s.switch.mean,
                    s.idle.mean,
                );
            }
            println!("wrote {}", out.join("results.csv").display());
            Ok(true)
        }
        Command::Verify { config, out } => {
            let outcome = verify::run(&config, &out)?;
            for r in &outcome.oracle {
                println!(
                    "oracle N={} M={} C={} p={}: {} states, {} interior, {} violations ({:.2}s)",
                    r.num_locations,
                    r.num_robots,
                    r.cap,
                    r.p,
                    r.states,
                    r.report.interior_states,
                    r.report.violations.len(),
                    r.seconds
                );
                for v in r.report.violations.iter().take(5) {
                    println!(
                        "  {:?} at {}: candidate {} vs {} (gap {:.3e})",
                        v.kind, v.state, v.candidate_action, v.competitor_action, v.gap
                    );
                }
            }
            for s in &outcome.coupling {
                println!(
                    "coupling {} from {}: {}/{} paths match, {} censored, mean cost gap {:.6} (se {:.6})",
                    s.scenario,
                    s.initial,
                    s.pattern_matches,
                    s.runs,
                    s.censored,
                    s.mean_cost_difference,
                    s.cost_difference_se
                );
            }
            println!("{}", if outcome.passed { "verify: PASS" } else { "verify: FAIL" });
            Ok(outcome.passed)
        }
        Command::Dwell { p, n, max } => {
            dwell::run(p, n, max, &mut std::io::stdout().lock())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
