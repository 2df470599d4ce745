//! Command-line front end: configuration, subcommands and output records.

pub mod commands;
pub mod config;
pub mod error;
pub mod record;

use std::path::Path;

pub use commands::{run, Command, Output};
pub use config::{Overrides, RunConfig};
pub use error::CliError;

/// Writes every table as `<stem>.csv` and the record as `<command>.json`.
pub fn write_outputs(out: &Output, dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    for (stem, text) in &out.tables {
        std::fs::write(dir.join(format!("{stem}.csv")), text)?;
    }
    std::fs::write(dir.join(format!("{}.json", out.record.command)), out.record.to_json()?)?;
    Ok(())
}
