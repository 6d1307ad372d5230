//! Config-driven experiment orchestration: the library side of the
//! `rhoscope` binary. Every run is reproducible bit-exactly from
//! (config, seed, tool version); all outputs are JSON and tidy CSV.

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{
    cmd_optics, cmd_plan, cmd_reconstruct, cmd_simulate, cmd_sweep, recompute_metrics,
};
pub use config::{ExperimentConfig, Mode, Overrides, ShotsBlock, StateSpec, SweepBlock};
pub use report::{Metrics, RunReport, SweepRow};
