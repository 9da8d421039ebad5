use std::path::PathBuf;
use std::process::ExitCode;

use aim_cli::{exit, parse_config, parse_threads, run_to_csv, run_validation, sweep_to_dir, CliError, Hooks, Overrides};
use clap::{Parser, Subcommand};

/// Run bandit experiments and check the entropy closed forms.
#[derive(Debug, Parser)]
#[command(name = "aim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment and write its aggregated regret table.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        horizon: Option<u64>,
        #[arg(long)]
        runs: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated policy labels.
        #[arg(long, value_delimiter = ',')]
        policies: Option<Vec<String>>,
    },
    /// Check the closed forms against numerical integration.
    Validate {
        /// Ignored; accepted so scripts can pass a config uniformly.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run an experiment and write per-instance and pooled tables.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn init_threads() -> Result<(), CliError> {
    let n = parse_threads(std::env::var("AIM_THREADS").ok().as_deref())?;
    // Fails only if a pool already exists, which cannot happen here.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn dispatch(command: Command) -> Result<(), CliError> {
    init_threads()?;
    match command {
        Command::Run { config, out, horizon, runs, seed, policies } => {
            let overrides = Overrides { horizon, runs, seed, policies };
            let cfg = parse_config(&config, &overrides)?;
            run_to_csv(&cfg, &out)?;
            eprintln!("wrote {}", out.display());
        }
        Command::Validate { .. } => {
            let report = run_validation(&Hooks::default())?;
            print!("{report}");
        }
        Command::Sweep { config, out } => {
            let cfg = parse_config(&config, &Overrides::default())?;
            let written = sweep_to_dir(&cfg, &out)?;
            eprintln!("wrote {} files to {}", written.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE as u8 } else { exit::OK as u8 });
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(report)) => {
            print!("{report}");
            eprintln!("error: validation failed");
            ExitCode::from(exit::VALIDATION as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
