//! Batch driver: Monte-Carlo sweeps, closed-form tables, comparisons and
//! the dense validation suite.

mod commands;
mod config;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{AnalyzeConfig, SimulateConfig};
use table::{Format, Table};

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration; exit status 2.
    Config(String),
    /// A validation failed; exit status 1.
    Validation(String),
    Io(io::Error),
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

#[derive(Parser)]
#[command(name = "eipsim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo sweep of one protocol.
    Simulate(Common),
    /// Closed-form curves.
    Analyze(Common),
    /// Several protocols and reference bounds at the same points.
    Compare(Common),
    /// Dense validation of the symbolic engine.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Replace every check's threshold.
        #[arg(long)]
        tolerance: Option<f64>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

impl Common {
    fn read_config(&self) -> Result<String, CliError> {
        let path = self
            .config
            .as_ref()
            .ok_or_else(|| CliError::Config("--config is required".into()))?;
        std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    fn simulate_config(&self) -> Result<SimulateConfig, CliError> {
        let mut cfg: SimulateConfig = config::parse(&self.read_config()?)?;
        if let Some(s) = self.seed {
            cfg.seed = Some(s);
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        Ok(cfg)
    }

    fn emit(&self, table: &Table) -> Result<(), CliError> {
        let mut out: Box<dyn Write> = match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        table.write(self.format, &mut out)?;
        out.flush()?;
        Ok(())
    }
}

fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("EIPSIM_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Config(format!("EIPSIM_THREADS: bad value {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("EIPSIM_THREADS: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    match cli.command {
        Command::Simulate(c) => c.emit(&commands::simulate(&c.simulate_config()?)?),
        Command::Compare(c) => c.emit(&commands::compare(&c.simulate_config()?)?),
        Command::Analyze(c) => {
            let cfg: AnalyzeConfig = config::parse(&c.read_config()?)?;
            c.emit(&commands::analyze(&cfg)?)
        }
        Command::Verify { common, tolerance } => {
            let (table, failed) = commands::verify(tolerance)?;
            common.emit(&table)?;
            if failed.is_empty() {
                Ok(())
            } else {
                let lines: Vec<String> = failed
                    .iter()
                    .map(|c| format!("{}: deviation {:e} > {:e}", c.name, c.deviation, c.tolerance))
                    .collect();
                Err(CliError::Validation(lines.join("\n")))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("validation failed:\n{msg}");
            ExitCode::from(1)
        }
        Err(CliError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Io(e)) => {
            eprintln!("io error: {e}");
            ExitCode::from(1)
        }
    }
}
