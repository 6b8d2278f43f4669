//! Command-line front end: run scenarios, validate scenario files, list
//! presets.
//!
//! Exit codes: 0 success (and `--check` passed), 1 `--check` failed,
//! 2 configuration or usage error, 3 I/O error. Log verbosity comes from
//! the `SO3_LOG_LEVEL` environment variable (error|warn|info|debug;
//! default warn).

use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use so3_align::export::{self, OutputFormat, RunMeta};
use so3_align::scenario::{self, Overrides, ScenarioError};
use so3_align::sim::{self, SimError};
use so3_align::summary;

#[derive(Parser)]
#[command(
    name = "so3-align",
    version,
    about = "Attitude-alignment simulations for kinematic robot swarms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or a built-in preset
    Simulate(SimulateArgs),
    /// Parse and validate a scenario file without running it
    Validate {
        /// Scenario file (TOML)
        scenario: PathBuf,
    },
    /// List built-in presets
    Presets,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario file (TOML); mutually exclusive with --preset
    scenario: Option<PathBuf>,
    /// Built-in preset name (see `presets`)
    #[arg(long, conflicts_with = "scenario")]
    preset: Option<String>,
    /// Override the integration step
    #[arg(long)]
    dt: Option<f64>,
    /// Override the run horizon
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    /// Override the RNG seed
    #[arg(long)]
    seed: Option<u64>,
    /// Write the trajectory to this file
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format for --out
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
    /// Evaluate the run against its configured claims and bounds
    #[arg(long)]
    check: bool,
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;

fn scenario_exit(err: &ScenarioError) -> u8 {
    match err {
        ScenarioError::Io { .. } => EXIT_IO,
        _ => EXIT_CONFIG,
    }
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SO3_LOG_LEVEL", "warn"))
        .format_timestamp(None)
        .init();

    match Cli::parse().command {
        Command::Simulate(args) => simulate(args),
        Command::Validate { scenario } => validate(&scenario),
        Command::Presets => {
            for name in scenario::preset_names() {
                let desc = scenario::preset_description(name).unwrap_or("");
                println!("{name:8} {desc}");
            }
            ExitCode::SUCCESS
        }
    }
}

fn simulate(args: SimulateArgs) -> ExitCode {
    let config = match (&args.scenario, &args.preset) {
        (Some(path), None) => scenario::load_scenario(path),
        (None, Some(name)) => scenario::preset(name),
        (None, None) => {
            return fail(
                EXIT_CONFIG,
                "simulate needs a scenario file or --preset NAME",
            )
        }
        (Some(_), Some(_)) => unreachable!("clap enforces the conflict"),
    };
    let config = match config {
        Ok(c) => c,
        Err(e) => return fail(scenario_exit(&e), e),
    };
    let config = match scenario::apply_overrides(
        config,
        &Overrides {
            dt: args.dt,
            t_end: args.t_end,
            seed: args.seed,
        },
    ) {
        Ok(c) => c,
        Err(e) => return fail(scenario_exit(&e), e),
    };

    let traj = match sim::run(&config) {
        Ok(t) => t,
        Err(e @ SimError::Config(_)) => return fail(EXIT_CONFIG, e),
        Err(e) => return fail(EXIT_CONFIG, format!("simulation failed: {e}")),
    };

    if let Some(out) = &args.out {
        let result = match args.format {
            OutputFormat::Csv => export::write_csv(out, &traj),
            OutputFormat::Json => export::write_json(out, &traj, RunMeta::from(&config)),
        };
        if let Err(e) = result {
            return fail(EXIT_IO, e);
        }
        log::info!("wrote {}", out.display());
    }

    println!(
        "simulated {}: {} samples, {} robots, dt = {}, t_end = {}, seed = {}",
        config.name,
        traj.times.len(),
        traj.robots.len(),
        config.dt,
        config.t_end,
        config.seed
    );

    if args.check {
        let report = summary::summarize(&traj, &config);
        println!("{report}");
        if !report.passed {
            return ExitCode::from(EXIT_CHECK_FAILED);
        }
    }
    ExitCode::SUCCESS
}

fn validate(path: &Path) -> ExitCode {
    match scenario::load_scenario(path) {
        Ok(config) => {
            println!(
                "ok: {} ({} robots, dt = {}, t_end = {}, seed = {})",
                config.name,
                config.robots.len(),
                config.dt,
                config.t_end,
                config.seed
            );
            ExitCode::SUCCESS
        }
        Err(e) => fail(scenario_exit(&e), e),
    }
}
