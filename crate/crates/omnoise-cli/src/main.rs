//! `omnoise` — noise budgets for cavity optomechanical displacement
//! sensing from structured TOML configs.
//!
//! Exit codes: 0 success, 2 config error, 3 physics-domain error,
//! 4 verification failure.

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod envelope;
mod output;

use commands::CmdError;
use config::{Engine, Format, GridSection, Spacing};

#[derive(Parser)]
#[command(
    name = "omnoise",
    version,
    about = "Quantum noise budgets for cavity optomechanical displacement sensing"
)]
struct Cli {
    /// Path to the TOML run configuration.
    #[arg(long, global = true)]
    config: Option<String>,
    /// Budget engine override: closedform (resonant only) or solver.
    #[arg(long, global = true, value_enum)]
    engine: Option<Engine>,
    /// Output path ("-" = stdout); figures treat this as a directory.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Output format override.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Frequency-grid override, `min_hz:max_hz:count[:log|linear]`.
    #[arg(long, global = true)]
    grid: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print every derived quantity (κ, η, g, N_c, P_min, P^sql, phases).
    Derive,
    /// Frequency-resolved noise budget (imprecision, QBA, external, total).
    Budget,
    /// Sweep the sideband noise decomposition over one variable.
    Sweep,
    /// Optimize probe power or cavity coupling.
    Optimize,
    /// Coherent power equivalent to the configured squeezed probe.
    Equivalence,
    /// Emit the standard figure datasets as CSV plus JSON sidecars.
    Figures {
        /// fig1 | fig2 | fig3 | fig4 | all (falls back to [figures] id).
        #[arg(long)]
        id: Option<String>,
    },
    /// Run the full verification suite; nonzero exit on any failure.
    Verify {
        /// Self-test hook: scale the closed-form imprecision inside the
        /// solver comparison to prove the suite trips.
        #[arg(long, hide = true)]
        inject_imprecision_scale: Option<f64>,
    },
}

fn parse_grid_flag(s: &str) -> Result<GridSection, config::ConfigError> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = |message: String| config::ConfigError::Invalid {
        key: "--grid",
        message,
    };
    if parts.len() < 3 || parts.len() > 4 {
        return Err(bad(format!(
            "expected min_hz:max_hz:count[:log|linear], got `{s}`"
        )));
    }
    let min_hz: f64 = parts[0].parse().map_err(|e| bad(format!("min_hz: {e}")))?;
    let max_hz: f64 = parts[1].parse().map_err(|e| bad(format!("max_hz: {e}")))?;
    let count: usize = parts[2].parse().map_err(|e| bad(format!("count: {e}")))?;
    let spacing = match parts.get(3).copied().unwrap_or("log") {
        "log" => Spacing::Log,
        "linear" => Spacing::Linear,
        other => return Err(bad(format!("unknown spacing `{other}`"))),
    };
    Ok(GridSection {
        min_hz,
        max_hz,
        count,
        spacing,
    })
}

fn run(cli: Cli) -> Result<(), CmdError> {
    let config_path = cli.config.as_deref().ok_or(config::ConfigError::Invalid {
        key: "--config",
        message: "a config file is required".into(),
    })?;
    let config = config::load(config_path)?;
    let resolved = config::resolve(&config)?;
    let engine = cli.engine.unwrap_or(config.run.engine);
    let format = cli.format.unwrap_or(config.run.format);
    let out = cli
        .out
        .as_deref()
        .or(config.run.out.as_deref())
        .map(str::to_owned);
    let grid_override = match cli.grid.as_deref() {
        Some(s) => Some(parse_grid_flag(s)?),
        None => config.run.grid.clone(),
    };

    match &cli.command {
        Command::Derive => commands::cmd_derive(&resolved, format, out.as_deref()),
        Command::Budget => commands::cmd_budget(
            &resolved,
            engine,
            grid_override.as_ref(),
            format,
            out.as_deref(),
        ),
        Command::Sweep => {
            let section = config.sweep.as_ref().ok_or(config::ConfigError::Invalid {
                key: "sweep",
                message: "the sweep command needs a [sweep] section".into(),
            })?;
            commands::cmd_sweep(&resolved, section, format, out.as_deref())
        }
        Command::Optimize => {
            let target = config.optimize.as_ref().map(|s| s.target.as_str()).ok_or(
                config::ConfigError::Invalid {
                    key: "optimize",
                    message: "the optimize command needs [optimize] target = \"power|coupling\""
                        .into(),
                },
            )?;
            commands::cmd_optimize(&resolved, target, format, out.as_deref())
        }
        Command::Equivalence => commands::cmd_equivalence(&resolved, format, out.as_deref()),
        Command::Figures { id } => {
            let id = id
                .as_deref()
                .or(config.figures.as_ref().map(|f| f.id.as_str()))
                .unwrap_or("all");
            commands::cmd_figures(&resolved, id, out.as_deref())
        }
        Command::Verify {
            inject_imprecision_scale,
        } => commands::cmd_verify(
            &resolved,
            config.verify.as_ref(),
            format,
            out.as_deref(),
            *inject_imprecision_scale,
        ),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("omnoise: {e}");
        std::process::exit(e.exit_code());
    }
}
