//! Configuration, the end-to-end three-theory comparison, parameter sweeps and
//! result files.

pub mod config;
pub mod output;
pub mod pipeline;

pub use config::{load_config_file, parse_config, parse_config_json, ConfigFile, ConfigOverrides, ExperimentConfig, ExperimentSection};
pub use output::{comparison_table, emit, read_table, sweep_row, sweep_table, Format, Table, SWEEP_COLUMNS};
pub use pipeline::{grid, resolve, run_comparison, sweep, Comparison, ExperimentParams, OmegaSnSource, SweepAxis};
