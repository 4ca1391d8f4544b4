use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use hashrep_cli::{emit, run, Command, Format, RunError, ScenarioConfig};

/// Finite-size hashing repeater analysis.
#[derive(Debug, Parser)]
#[command(name = "hashrep", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// TOML scenario file.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the output format in the config.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

const EXIT_CONFIG: u8 = 1;
const EXIT_COMPUTE: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut config = match ScenarioConfig::load(&cli.config) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_CONFIG, e.into()),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(format) = cli.format {
        config.format = format;
    }
    let table = match run(cli.command, &config) {
        Ok(t) => t,
        Err(e @ RunError::Config(_)) => return fail(EXIT_CONFIG, e.into()),
        Err(e) => return fail(EXIT_COMPUTE, e.into()),
    };
    match write(&table, config.format, cli.out.as_ref()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(EXIT_COMPUTE, e),
    }
}

fn write(table: &hashrep_cli::ResultTable, format: Format, out: Option<&PathBuf>) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            let mut w = BufWriter::new(file);
            emit(table, format, &mut w)?;
            w.flush()?;
            if format == Format::Csv {
                let meta = path.with_extension("meta.json");
                let text = serde_json::to_string_pretty(&table.metadata)? + "\n";
                std::fs::write(&meta, text).with_context(|| format!("cannot write {}", meta.display()))?;
            }
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            emit(table, format, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn fail(code: u8, e: anyhow::Error) -> ExitCode {
    eprintln!("error: {e:#}");
    ExitCode::from(code)
}
