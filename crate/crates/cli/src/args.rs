use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::EXIT_CODES_HELP;

#[derive(Debug, Parser)]
#[command(name = "ldi", version, about = "Layered depth image dataset generation, composition, view synthesis and evaluation")]
#[command(after_help = EXIT_CODES_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate seeded layered scenes with a perturbed target view each.
    #[command(after_help = EXIT_CODES_HELP)]
    Gen(GenArgs),
    /// Minimum-depth-pool a scene's layers into one image and an index map.
    #[command(after_help = EXIT_CODES_HELP)]
    Compose(ComposeArgs),
    /// Render a scene's LDI from a moved camera.
    #[command(after_help = EXIT_CODES_HELP)]
    Synth(SynthArgs),
    /// Re-compose a scene without every instance of one class.
    #[command(after_help = EXIT_CODES_HELP)]
    Remove(RemoveArgs),
    /// Compare a prediction against ground truth and write a JSON report.
    #[command(after_help = EXIT_CODES_HELP)]
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    /// Run configuration JSON (the run_config.json of an earlier run); flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of candidate scenes; rejected ones are not written.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub height: Option<usize>,
    #[arg(long)]
    pub min_objects: Option<usize>,
    #[arg(long)]
    pub max_objects: Option<usize>,
    /// Minimum fraction of pixels covered by two or more layers.
    #[arg(long)]
    pub overlap_threshold: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub config: ConfigArg,
}

#[derive(Debug, Args)]
pub struct ComposeArgs {
    pub scene: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub config: ConfigArg,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    pub scene: PathBuf,
    /// Camera motion "tx,ty,tz,rx,ry,rz" in the source camera frame, metres and
    /// degrees. Rotation order is yaw (ry), then pitch (rx), then roll (rz).
    #[arg(long, allow_hyphen_values = true)]
    pub pose: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub config: ConfigArg,
}

#[derive(Debug, Args)]
pub struct RemoveArgs {
    pub scene: PathBuf,
    /// Class name from the scene's class table.
    #[arg(long)]
    pub class: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub config: ConfigArg,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Prediction: an image directory, a scene directory, or a directory of those.
    pub pred: PathBuf,
    /// Ground truth with the same layout as the prediction.
    pub gt: PathBuf,
    #[arg(long)]
    pub report: PathBuf,
    #[command(flatten)]
    pub config: ConfigArg,
}
