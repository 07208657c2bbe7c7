//! Command-line front end for `pathsym-core`: the state mini-language, JSON
//! state files, settings files, output formatting and parallel runners.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod headline;
pub mod output;
pub mod parallel;
pub mod spec;
pub mod statefile;

pub use config::Settings;
pub use error::CliError;
pub use spec::{SpecError, StateSpec};
