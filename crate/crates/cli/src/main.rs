use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

use commands::EXIT_CONFIG;
use config::RunConfig;

type Runner = fn(&RunConfig) -> Result<u8, commands::Failure>;

/// Two-site DMFT with a VQE impurity solver.
///
/// Exit status: 0 success, 1 verification failure, 2 not converged,
/// 3 configuration or input error.
#[derive(Parser)]
#[command(name = "qdmft", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ground state, excited states and weights at fixed bath parameters.
    Solve(Common),
    /// Self-consistency loop (half-filled or general), with optional z(U) scan.
    Dmft(Common),
    /// Densities of states and self-energy at fixed bath parameters.
    Dos(Common),
    /// Property suites against exact diagonalization.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    /// TOML file with [model], [solver] and [output] sections.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one key, e.g. `--set model.u=3.5`.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    set: Vec<String>,
    /// Output directory (overrides output.dir).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, run): (&Common, Runner) = match &cli.command {
        Command::Solve(c) => (c, commands::solve),
        Command::Dmft(c) => (c, commands::dmft),
        Command::Dos(c) => (c, commands::dos),
        Command::Verify(c) => (c, commands::verify),
    };
    let cfg = match RunConfig::load(common.config.as_deref(), &common.set, common.out.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match run(&cfg) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.status)
        }
    }
}
