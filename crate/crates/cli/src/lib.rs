//! File formats, pipeline commands, and parallel drivers around
//! `walkrank-core`. The `walkrank` binary is a thin front-end over
//! [`commands`].

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod parallel;

pub use config::PipelineConfig;
pub use error::CliError;
