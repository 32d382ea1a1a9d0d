//! Spec-file parsing, command dispatch and report rendering for the
//! `aberrant` binary.

pub mod commands;
pub mod report;
pub mod spec_file;

pub use commands::{run_command, CliError, Command, Method, Options};
pub use report::{Report, Status};
pub use spec_file::{parse_spec, CriterionName, DesignSpecFile, ParseError};

/// Reads and parses a spec file.
pub fn load_spec(path: &std::path::Path) -> Result<DesignSpecFile, CliError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: shown.clone(),
        source,
    })?;
    parse_spec(&text).map_err(|source| CliError::Parse {
        path: shown,
        source,
    })
}
