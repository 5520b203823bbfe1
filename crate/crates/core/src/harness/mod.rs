//! Configuration-driven front end: tasks that tabulate closed forms or
//! simulations, and the verify suites that check them against each other.

pub mod config;
pub mod grid;
pub mod report;
pub mod tasks;
pub mod verify;

pub use config::{
    parse_config, Axis, ConfigError, Format, GridSpec, McControls, OutputSpec, RunConfig, Suite,
    Task,
};
pub use grid::{emit_grid, grid_to_string, Grid, GridRow};
pub use report::{CheckKind, CheckRecord, McReport, Summary};
pub use tasks::run_grid_task;
pub use verify::{reference_model, run_suite, run_verify};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] crate::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("task verify produces a report, not a grid")]
    NotAGridTask,
}

/// Seed of an independent family of path streams, derived from the run seed
/// and a label (FNV-1a of the label, mixed into the seed).
pub fn stream_seed(seed: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    seed ^ h
}
