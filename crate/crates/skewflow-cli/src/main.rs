use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use skewflow_cli::{run_config, AnalysisConfig, CliError};

/// Workbench for skew-evolution semiflow analysis: verifies the defining
/// axioms, certifies exponential dichotomy/trichotomy on sample grids, and
/// runs the growth-function and sup/integral criteria.
#[derive(Parser)]
#[command(name = "skewflow", version)]
struct Cli {
    /// Path to the JSON analysis configuration.
    #[arg(long)]
    config: PathBuf,

    /// Write the JSON report here (overrides the config's output.report);
    /// default is stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Exit with code 1 when the verdict is rejected or a criterion fails.
    #[arg(long)]
    strict: bool,

    /// Override the config's random seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn read_config(path: &Path, seed_override: Option<u64>) -> Result<AnalysisConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut config = AnalysisConfig::parse(&text)?;
    if let Some(seed) = seed_override {
        config.seed = seed;
    }
    Ok(config)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    let io_err = |source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(io_err)?;
    }
    std::fs::write(path, contents).map_err(io_err)
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let config = read_config(&cli.config, cli.seed)?;
    let outcome = run_config(&config)?;

    let report_json = outcome.report.to_json()?;
    let report_path = cli
        .out
        .clone()
        .or_else(|| config.output.as_ref().and_then(|o| o.report.clone()));
    match report_path {
        Some(path) => write_file(&path, &report_json)?,
        None => print!("{report_json}"),
    }

    if let (Some(csv), Some(path)) = (
        &outcome.plot,
        config.output.as_ref().and_then(|o| o.plot_data.as_ref()),
    ) {
        write_file(path, csv)?;
    }

    Ok(outcome.report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(passed) => {
            if passed || !cli.strict {
                ExitCode::from(0)
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("skewflow: {err}");
            ExitCode::from(2)
        }
    }
}
