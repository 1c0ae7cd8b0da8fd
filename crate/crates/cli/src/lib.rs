//! Library side of the `labelrankt` command: run, sweep, bench and generate
//! as plain functions, plus the CSV run report.

pub mod commands;
pub mod error;
pub mod report;

pub use commands::{
    bench, generate, run, sweep, write_run, BenchReport, GraphView, Mode, RunOptions, RunOutput,
    SweepRow, DEFAULT_Q_GRID,
};
pub use error::{CliError, Result};
pub use report::{RunRecord, RunReport};
