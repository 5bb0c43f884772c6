//! Batch front-end for `minmove-core`: TOML configs, scenario presets and
//! CSV output.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod presets;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{cmd_converge, cmd_run, cmd_sweep_eps, sweep_row, SweepRow};
pub use config::{parse_config, parse_config_str, RunConfig};
pub use error::CliError;
pub use presets::Preset;

#[derive(Debug, Parser)]
#[command(name = "minmove", version, about = "Minimizing-movement wave solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Common {
    /// TOML run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `output_dir` from the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one trajectory.
    Run {
        #[command(flatten)]
        common: Common,
    },
    /// Time-step refinement study against the reference integrator.
    Converge {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "128,256,512")]
        n_list: Vec<usize>,
    },
    /// Repeat a Ginzburg–Landau scenario over several eps.
    SweepEps {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.05,0.025")]
        eps_list: Vec<f64>,
    },
}

fn out_dir(common: &Common, config: &RunConfig) -> PathBuf {
    common
        .out
        .clone()
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"))
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Run { common } => {
            let config = parse_config(&common.config)?;
            cmd_run(&config, &out_dir(common, &config)).map(|_| ())
        }
        Command::Converge { common, n_list } => {
            let config = parse_config(&common.config)?;
            cmd_converge(&config, n_list, &out_dir(common, &config)).map(|_| ())
        }
        Command::SweepEps { common, eps_list } => {
            let config = parse_config(&common.config)?;
            cmd_sweep_eps(&config, eps_list, &out_dir(common, &config)).map(|_| ())
        }
    }
}
