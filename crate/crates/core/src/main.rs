use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stochastic_predprey::config::{self, presets, ScenarioConfig};
use stochastic_predprey::workflow::{self, WorkflowError};

#[derive(Parser)]
#[command(name = "predprey", version, about = "Stochastic predator-prey regimes and Monte Carlo checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the long-time regime of each species.
    Analyze(RunArgs),
    /// Simulate the ensemble and write paths and statistics.
    Simulate(RunArgs),
    /// Analyze, simulate and compare.
    Verify(RunArgs),
    /// List or export the shipped scenarios.
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    allow_degenerate: bool,
}

#[derive(Subcommand)]
enum PresetAction {
    List,
    /// Print a preset to stdout.
    Write { name: String },
}

fn load(args: &RunArgs) -> Result<ScenarioConfig, WorkflowError> {
    let text = std::fs::read_to_string(&args.config).map_err(|source| config::ConfigError::Io {
        path: args.config.clone(),
        source,
    })?;
    let mut cfg = config::parse_config(&text)?;
    if let Some(seed) = args.seed {
        cfg.sim.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.output.directory = out.clone();
    }
    cfg.flags.allow_degenerate |= args.allow_degenerate;
    cfg.validated_model()?;
    Ok(cfg)
}

fn run(command: Command) -> Result<u8, WorkflowError> {
    match command {
        Command::Analyze(args) => {
            let report = workflow::cmd_analyze(&load(&args)?)?;
            print!("{}", workflow::describe_report(&report));
            Ok(0)
        }
        Command::Simulate(args) => {
            let outcome = workflow::cmd_simulate(&load(&args)?)?;
            print!("{}", workflow::describe_summary(&outcome.summary));
            Ok(outcome.exit_code() as u8)
        }
        Command::Verify(args) => {
            let outcome = workflow::cmd_verify(&load(&args)?)?;
            print!("{}", workflow::describe_verify(&outcome));
            Ok(outcome.exit_code() as u8)
        }
        Command::Presets { action: PresetAction::List } => {
            for name in presets::names() {
                println!("{name}");
            }
            Ok(0)
        }
        Command::Presets {
            action: PresetAction::Write { name },
        } => match presets::text(&name) {
            Some(text) => {
                print!("{text}");
                Ok(0)
            }
            None => {
                eprintln!("no preset named `{name}`");
                Ok(2)
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
