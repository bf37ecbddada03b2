//! `nearfield`: near-field distances for rotated antenna arrays from the
//! command line.

mod commands;
mod error;
mod settings;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::{SweepKind, SweepRange};
use crate::error::CliError;
use crate::settings::{Resolved, Settings};

#[derive(Debug, Parser)]
#[command(
    name = "nearfield",
    version,
    about = "Near-field distance between misaligned antenna arrays"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    #[command(flatten)]
    settings: Settings,
    /// key=value file with default settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the resolved settings as a config file and exit.
    #[arg(long = "dump-config")]
    dump_config: bool,
}

impl Common {
    fn merged(&self) -> Result<Settings, CliError> {
        let Some(path) = &self.config else {
            return Ok(self.settings.clone());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
        Ok(Settings::from_config_text(&text)?.overridden_by(&self.settings))
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Near-field distance by simulation and closed forms.
    Solve {
        #[command(flatten)]
        common: Common,
    },
    /// Phase spread across all element pairs at one separation.
    Spread {
        #[command(flatten)]
        common: Common,
        /// AP-UE separation in metres.
        #[arg(long)]
        separation: f64,
    },
    /// CSV sweep of one parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        kind: SweepKind,
        #[arg(long, allow_hyphen_values = true)]
        start: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        stop: Option<f64>,
        #[arg(long)]
        count: Option<usize>,
    },
    /// CSV of the near-field distance over (theta, phi).
    Heatmap {
        #[command(flatten)]
        common: Common,
        /// Grid points per angle axis.
        #[arg(long, default_value_t = 19)]
        count: usize,
    },
    /// Re-run the acceptance checks and print a pass/fail table.
    Validate {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, hide = true, default_value_t = 0.0, allow_hyphen_values = true)]
        perturb: f64,
    },
}

/// Resolves the settings, or handles `--dump-config` and returns `None`.
fn prepare(common: &Common) -> Result<Option<(Settings, Resolved)>, CliError> {
    let settings = common.merged()?;
    let resolved = settings.resolve()?;
    if common.dump_config {
        commands::emit(resolved.out.as_deref(), &resolved.dump())?;
        return Ok(None);
    }
    Ok(Some((settings, resolved)))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve { common } => {
            if let Some((_, r)) = prepare(&common)? {
                commands::emit(r.out.as_deref(), &commands::solve(&r)?)?;
            }
        }
        Command::Spread { common, separation } => {
            if let Some((_, r)) = prepare(&common)? {
                commands::emit(r.out.as_deref(), &commands::spread(&r, separation)?)?;
            }
        }
        Command::Sweep {
            common,
            kind,
            start,
            stop,
            count,
        } => {
            if let Some((s, r)) = prepare(&common)? {
                let text = commands::sweep(&r, kind, SweepRange { start, stop, count }, s.degrees())?;
                commands::emit(r.out.as_deref(), &text)?;
            }
        }
        Command::Heatmap { common, count } => {
            if let Some((_, r)) = prepare(&common)? {
                commands::emit(r.out.as_deref(), &commands::heatmap(&r, count)?)?;
            }
        }
        Command::Validate { out, perturb } => {
            let checks = validate::run(perturb);
            commands::emit(out.as_deref(), &validate::render(&checks))?;
            validate::ensure_all_passed(&checks)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
