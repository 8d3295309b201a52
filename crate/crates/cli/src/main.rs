use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use disdrift_cli::{commands, CliError, ExperimentConfig, Outcome, RunOptions};

#[derive(Parser)]
#[command(name = "disdrift", version, about = "Strong-convergence experiments for SDEs with discontinuous drift")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write sample trajectories.
    Simulate(RunArgs),
    /// Measure RMSE over a step-size ladder and regress the order.
    EstimateOrder(RunArgs),
    /// Mean step counts of the adaptive scheme.
    AdaptiveCost(RunArgs),
    /// Fractional seminorms and predicted orders.
    Seminorm(RunArgs),
    /// Fractions of paths visiting the discontinuity, inward vs outward drift.
    RareEvent(RunArgs),
    /// List the compiled-in presets.
    Presets,
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Master seed; overrides the configuration.
    #[arg(long, env = "DISDRIFT_SEED")]
    seed: Option<u64>,
    /// Output CSV path; overrides the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores). Never changes results.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

type Runner = fn(&ExperimentConfig, &RunOptions) -> Result<Outcome, CliError>;

fn run(args: RunArgs, runner: Runner) -> Result<Outcome, CliError> {
    let cfg = ExperimentConfig::load(&args.config)?;
    let opts = RunOptions {
        seed: args.seed,
        out: args.out,
        workers: args.workers,
    };
    runner(&cfg, &opts)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => run(a, commands::simulate),
        Command::EstimateOrder(a) => run(a, commands::estimate_order_cmd),
        Command::AdaptiveCost(a) => run(a, commands::adaptive_cost),
        Command::Seminorm(a) => run(a, commands::seminorm),
        Command::RareEvent(a) => run(a, commands::rare_event),
        Command::Presets => {
            println!("{}", commands::list_presets());
            return ExitCode::SUCCESS;
        }
    };
    match result {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            for path in outcome.csv.iter().chain(&outcome.script) {
                eprintln!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
