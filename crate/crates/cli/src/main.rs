use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

mod config;
mod emit;
mod run;

use config::ConfigError;
use run::{Failure, EXIT_CONFIG, EXIT_IO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Comma-separated table with `# ` provenance lines.
    Tabular,
    /// Single JSON document.
    Structured,
}

/// Runs one experiment described by a config file.
#[derive(Debug, Parser)]
#[command(name = "petlab", version)]
struct Args {
    /// Experiment config (`.toml`, otherwise JSON).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config fixed-point precision.
    #[arg(long)]
    precision_bits: Option<u32>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Tabular)]
    format: Format,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(summary) => {
            print!("{summary}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code as u8)
        }
    }
}

fn run(args: &Args) -> Result<String, Failure> {
    let mut cfg = config::load(&args.config).map_err(|e| match e {
        ConfigError::Io(m) => Failure::new(EXIT_IO, m),
        ConfigError::Schema(m) => Failure::new(EXIT_CONFIG, format!("invalid config: {m}")),
    })?;
    cfg.seed = Some(args.seed.or(cfg.seed).unwrap_or(0));
    let bits = args.precision_bits.or(cfg.precision_bits).unwrap_or(config::DEFAULT_BITS);
    if !(64..=4096).contains(&bits) {
        return Err(Failure::new(EXIT_CONFIG, format!("precision_bits must be in [64, 4096], got {bits}")));
    }
    cfg.precision_bits = Some(bits);
    let report = run::execute(&cfg.experiment, cfg.seed.unwrap_or(0), bits)?;
    emit::write(&args.out, &cfg, &report, args.format).map_err(|e| Failure::new(EXIT_IO, e.to_string()))
}
