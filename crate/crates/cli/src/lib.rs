//! Command-line experiment runner: path simulation, moment tables, pricing,
//! variance-reduction studies and runtime benchmarks, all written as CSV.

pub mod commands;
pub mod config;

pub use commands::run;
pub use config::{parse_config, Command, ExperimentConfig};
