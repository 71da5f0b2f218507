//! Command-line front end for `starsym_core`: body specification files,
//! parallel sweeps, CSV/JSON/SVG output and the `verify` suite.

pub mod body;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod parallel;
pub mod verify;

pub use body::{BodyKind, BodySpec};
pub use config::RunConfig;
pub use error::CliError;
