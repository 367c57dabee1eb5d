use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use nems_entangle::exec::Execution;
use nems_entangle_cli::output::write_fit_report;
use nems_entangle_cli::{fit_columns, parse_config, run, spectrum_report, CliError, Result, RunOptions, ScenarioConfig};

#[derive(Parser, Debug)]
#[command(name = "nems-entangle", version, about = "Ion-ion entanglement through a nanomechanical resonator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the scenario described by a config file and write its CSV output.
    Simulate {
        config: PathBuf,
        /// Directory for relative output paths.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; 1 runs sequentially.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Print the spectrum of the system in a config file.
    Spectrum { config: PathBuf },
    /// Fit a trend model to two columns of a CSV file.
    Fit {
        csv: PathBuf,
        #[arg(long)]
        model: String,
        /// Abscissa column (default: the first column).
        #[arg(long)]
        x: Option<String>,
        /// Ordinate column (default: n12 if present, else the second column).
        #[arg(long)]
        y: Option<String>,
    },
}

fn load(path: &Path) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text).map_err(|source| CliError::Config {
        path: path.to_path_buf(),
        source,
    })
}

fn execution(threads: Option<usize>) -> Result<Execution> {
    match threads {
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(1) => Ok(Execution::Sequential),
        #[cfg(feature = "parallel")]
        Some(n) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}")))?;
            Ok(Execution::Parallel)
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => Ok(Execution::Sequential),
        None => Ok(Execution::Parallel),
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    let mut stdout = io::stdout().lock();
    match cmd {
        Command::Simulate { config, out, threads } => {
            let cfg = load(&config)?;
            let opts = RunOptions {
                out_dir: out,
                exec: execution(threads)?,
            };
            let report = run(&cfg, &opts, &mut stdout)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            for f in &report.files {
                eprintln!("wrote {}", f.display());
            }
        }
        Command::Spectrum { config } => {
            let cfg = load(&config)?;
            let table = spectrum_report(&cfg.system)?;
            stdout
                .write_all(table.as_bytes())
                .map_err(|e| CliError::io("<stdout>", e))?;
        }
        Command::Fit { csv, model, x, y } => {
            let row = fit_columns(&csv, &model, x.as_deref(), y.as_deref())?;
            if let Err(e) = &row.result {
                return Err(CliError::Model(e.clone()));
            }
            write_fit_report(&mut stdout, std::slice::from_ref(&row))
                .map_err(|e| CliError::io("<stdout>", e))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
