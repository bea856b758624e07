//! Command-line front end: runs protocols, anonymity analyses and graph
//! audits from flags or a JSON config, writing reproducible JSON reports.

pub mod config;
pub mod error;
pub mod exec;
pub mod output;
pub mod sweep;

pub use config::{Protocol, RunConfig};
pub use error::CliError;
pub use exec::{run, Report, Status};
