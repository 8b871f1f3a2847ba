//! Library side of the `esl` binary: config loading, the three
//! subcommands and output writers.

pub mod config;
pub mod dwell;
pub mod output;
pub mod simulate;
pub mod verify;
