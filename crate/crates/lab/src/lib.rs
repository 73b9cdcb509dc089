//! Experiment harness around `glasscut-core`: file formats, persistence,
//! replicated experiments with bitwise-replayable records, and the CLI.

pub mod cli;
pub mod experiments;
pub mod gformat;
pub mod persist;
pub mod records;
pub mod stats;
