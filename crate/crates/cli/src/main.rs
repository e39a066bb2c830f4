use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use suctopp_cli::{commands, CliError, RunContext, Scenario};

#[derive(Parser)]
#[command(name = "suctopp", version, about = "Suction-grasp wrench cones and time-optimal retiming")]
struct Cli {
    /// Scenario file (TOML).
    #[arg(long, global = true, default_value = "scenario.toml")]
    config: PathBuf,
    /// Override the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Constraint tolerance used by `validate`.
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build or approximate a contact wrench cone.
    Cone {
        #[command(subcommand)]
        action: ConeCommand,
    },
    /// Time-optimally retime a waypoint path.
    Retime {
        #[arg(long)]
        path: PathBuf,
        /// Cone file; defaults to the exact cone of the configured cup.
        #[arg(long)]
        cone: Option<PathBuf>,
        /// Kinematic limits only.
        #[arg(long, conflicts_with = "cone")]
        no_scc: bool,
    },
    /// Check a sampled trajectory against the grasp constraint.
    Validate {
        #[arg(long)]
        trajectory: PathBuf,
        #[arg(long)]
        cone: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        speed_scale: f64,
    },
    /// Retime random paths with and without the grasp constraint.
    Bench {
        #[arg(long)]
        cone: Option<PathBuf>,
        #[arg(long)]
        n_paths: Option<usize>,
    },
}

#[derive(Subcommand)]
enum ConeCommand {
    /// Exact cone of the configured cup.
    Build,
    /// Guided inner approximation of an exact cone.
    Approx {
        #[arg(long)]
        exact: PathBuf,
    },
}

fn run(cli: Cli) -> Result<serde_json::Value, CliError> {
    let ctx = RunContext::new(Scenario::load(&cli.config)?, cli.seed, cli.out);
    match cli.command {
        Command::Cone { action: ConeCommand::Build } => commands::cone_build(&ctx),
        Command::Cone { action: ConeCommand::Approx { exact } } => commands::cone_approx(&ctx, &exact),
        Command::Retime { path, cone, no_scc } => commands::retime(&ctx, &path, cone.as_deref(), no_scc),
        Command::Validate { trajectory, cone, speed_scale } => {
            commands::validate(&ctx, &trajectory, cone.as_deref(), speed_scale, cli.tol)
        }
        Command::Bench { cone, n_paths } => commands::bench(&ctx, cone.as_deref(), n_paths),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(report) => {
            // a closed pipe (`| head`) is not an error; the report is on disk
            let text = serde_json::to_string_pretty(&report).unwrap_or_default();
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
