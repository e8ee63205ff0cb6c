//! Command-line driver: dataset generation, composition, view synthesis,
//! object removal and evaluation.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use args::{Cli, Command};
pub use config::{parse_pose, RunConfig, RUN_CONFIG_FILE};
pub use error::{exit, CliError, Result};

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Gen(a) => commands::run_gen(a).map(drop),
        Command::Compose(a) => commands::run_compose(a),
        Command::Synth(a) => commands::run_synth(a).map(drop),
        Command::Remove(a) => commands::run_remove(a),
        Command::Eval(a) => report::run_eval(a).map(drop),
    }
}
