//! Configuration and orchestration behind the `ovbound` binary.

mod commands;
mod config;

pub use commands::{cmd_bounds, cmd_delta_star, cmd_fit, cmd_id_sets, cmd_simulate, cmd_sweep};
pub use config::{BoxSpec, OutputFormat, RmaxLow, RunConfig, DEFAULT_STEP, DEFAULT_SWEEP_STEPS};
