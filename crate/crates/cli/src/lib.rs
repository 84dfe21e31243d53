//! Configuration, command dispatch and file formats for the `yamabe` tool.

// `!(x > 0.0)` is used deliberately so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod records;

pub use commands::{dispatch, Command};
pub use config::RunConfig;
pub use error::CliError;
