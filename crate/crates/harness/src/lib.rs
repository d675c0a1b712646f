//! Experiment driver for the `fracsis` crate.
//!
//! Loads run configs, runs the series solution, the two time-stepping
//! schemes and the classical closed form on a shared grid, measures their
//! pairwise max-norm distances and writes reproducible outputs. The
//! `fracsis` binary is a thin command line layer over this library.

pub mod config;
pub mod emit;
pub mod error;
pub mod runs;

pub use config::{load_config, resolve, Format, Preset, RawConfig, RunConfig};
pub use error::{HarnessError, Result};
pub use runs::{
    linf_distance, run_c0_suite, run_config, run_method, run_table1, ComparisonReport, RunOutput,
};
