use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ftrl_approach::harness::{self, EXIT_FAILURE};

#[derive(Parser)]
#[command(name = "ftrl-approach", version, about = "FTRL approachability experiments and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every seed of a config and write steps.csv and summary.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to the config's output_dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a property suite and print a table of checks.
    Verify {
        /// geometry, regularizers, solvers, bounds, equivalence or all.
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Run a config at several horizons and fit the rate.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Ascending horizons, comma separated.
        #[arg(long = "T", value_delimiter = ',', required = true)]
        horizons: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config, out } => harness::cmd_run(config, out.as_deref()),
        Command::Verify { suite } => harness::cmd_verify(suite),
        Command::Sweep { config, horizons, out } => harness::cmd_sweep(config, horizons, out.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAILURE as u8)
        }
    }
}
