use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use robin_eit::commands::{execute, Command, Options};

/// Simulate current-gap data for a Robin inclusion in the unit disk and image it.
#[derive(Parser)]
#[command(name = "robin-eit", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Scenario file (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Directory for output files.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// Noise seed, overriding the scenario.
    #[arg(long, global = true, value_name = "INT")]
    seed: Option<u64>,

    /// Suppress progress messages.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Run the full pipeline and write the field, spectrum and metadata.
    Run,
    /// Check a scenario without running any solver.
    Validate,
    /// Write only the singular values of the imaging data.
    Spectrum,
    /// Compare full, Born and point-source data across inclusion scales.
    Scaling,
    /// Truncation error of the concentric-disc series operator.
    Convergence,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(config) = cli.config else {
        eprintln!("error: --config PATH is required");
        return ExitCode::from(2);
    };
    let cmd = match cli.command {
        Cmd::Run => Command::Run,
        Cmd::Validate => Command::Validate,
        Cmd::Spectrum => Command::Spectrum,
        Cmd::Scaling => Command::Scaling,
        Cmd::Convergence => Command::Convergence,
    };
    let opts = Options { config, out: cli.out, seed: cli.seed, quiet: cli.quiet };
    match execute(cmd, &opts) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
