//! Reproducible experiment pipeline behind the `wavechaos` binary.
//!
//! Each command is a plain serde config. Running one validates it, computes
//! everything in memory, then commits the outputs and a manifest together.
//! The manifest stores the resolved config, so `replay` can rerun it.

mod analyze;
mod commands;
mod compare;
mod fit;
mod graph;
mod inputs;
mod rmt;
mod theory;

pub use analyze::AnalyzeRun;
pub use commands::{replay, run, CliError, CommandConfig, ReplayReport, RunReport};
pub use compare::{Component, CompareRun};
pub use fit::FitRun;
pub use graph::GraphRun;
pub use inputs::{InputKind, InputRef};
pub use rmt::RmtRun;
pub use theory::TheoryRun;

/// Exit codes by failure category.
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_IO: i32 = 4;
