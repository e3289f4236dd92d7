use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use traject::{list_scenarios, run_scenario, ScenarioName};

#[derive(Parser)]
#[command(name = "traject", version, about = "Run trajectory-ensemble scenarios from TOML configs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its outputs.
    Run {
        scenario: ScenarioName,
        /// TOML file with optional `scenario` and `seed` keys and a [params] table.
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory.
        #[arg(long, env = "TRAJECT_OUT_DIR", default_value = "traject-out")]
        out: PathBuf,
    },
    /// Print every scenario with its parameters and defaults.
    ListScenarios,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListScenarios => {
            print!("{}", list_scenarios());
            ExitCode::SUCCESS
        }
        Command::Run { scenario, config, seed, out } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read config {}: {e}", config.display());
                    return ExitCode::from(2);
                }
            };
            match run_scenario(scenario, &text, seed, &out) {
                Ok(paths) => {
                    for p in paths {
                        println!("{}", p.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(f) => {
                    eprintln!("error: {f}");
                    ExitCode::from(f.exit_code() as u8)
                }
            }
        }
    }
}
