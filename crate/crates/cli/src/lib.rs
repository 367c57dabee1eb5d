//! Scenario runner for `nems-entangle`: config parsing, simulations, sweeps,
//! trend fits and CSV output.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{parse_config, ConfigError, Scenario, ScenarioConfig};
pub use error::{CliError, Result};
pub use run::{fit_columns, run, spectrum_report, RunOptions, RunReport};
