use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use incrprox::apps::lasso::LassoInstance;
use incrprox::apps::weber::WeberInstance;
use incrprox_cli::bench::{cmd_bench, parse_seeds};
use incrprox_cli::run::{cmd_run, cmd_validate};
use incrprox_cli::CliError;

#[derive(Parser)]
#[command(name = "incrprox", version, about = "Incremental subgradient-proximal solvers")]
struct Cli {
    /// Print nothing but errors.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the solver described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Check a config file without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a benchmark suite over several seeds.
    Bench {
        #[arg(long)]
        suite: String,
        /// A count N (seeds 0..N) or a comma-separated list.
        #[arg(long, default_value = "20")]
        seeds: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Write a random problem instance as JSON.
    Generate {
        #[arg(long, value_enum)]
        kind: InstanceKind,
        /// Number of components.
        #[arg(long)]
        m: usize,
        /// Dimension.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Regularization weight (lasso only).
        #[arg(long, default_value_t = 0.1)]
        gamma: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum InstanceKind {
    Lasso,
    Weber,
}

fn generate(kind: InstanceKind, m: usize, n: usize, seed: u64, gamma: f64, out: &PathBuf) -> anyhow::Result<()> {
    let text = match kind {
        InstanceKind::Lasso => serde_json::to_string_pretty(&LassoInstance::random(m, n, gamma, seed)?)?,
        InstanceKind::Weber => serde_json::to_string_pretty(&WeberInstance::random(m, n, seed)?)?,
    };
    std::fs::write(out, text + "\n")?;
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let quiet = cli.quiet;
    match cli.command {
        Command::Run { config, out } => cmd_run(&config, &out, quiet).map(|_| ()),
        Command::Validate { config } => cmd_validate(&config, quiet),
        Command::Bench { suite, seeds, out } => {
            let report = cmd_bench(&suite, &parse_seeds(&seeds)?, &out, quiet)?;
            if report.pass {
                Ok(())
            } else {
                Err(CliError::Solver(format!("suite {suite}: some criteria failed")))
            }
        }
        Command::Generate {
            kind,
            m,
            n,
            seed,
            gamma,
            out,
        } => generate(kind, m, n, seed, gamma, &out).map_err(|e| CliError::Config(format!("{e:#}"))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
