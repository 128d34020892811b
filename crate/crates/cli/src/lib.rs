//! Library side of the `mzi-limits` command-line tool.

pub mod config;
pub mod error;
pub mod output;
pub mod recipes;
pub mod validate;

use std::path::Path;

use serde_json::Value;

pub use config::{Command, OutputFormat, RunConfig};
pub use error::CliError;
pub use recipes::{run, Row};

/// Reads a configuration file into a JSON value.
pub fn read_config(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        message: format!("{}: {e}", path.display()),
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

/// Validates a merged document and turns it into a [`RunConfig`].
pub fn resolve(doc: &Value) -> Result<RunConfig, CliError> {
    let violations = validate::validate_value(doc);
    if !violations.is_empty() {
        return Err(CliError::Config {
            message: format!("{} configuration violation(s)", violations.len()),
            violations,
        });
    }
    serde_json::from_value(doc.clone()).map_err(|e| CliError::config(e.to_string()))
}

/// Evaluates a configuration and writes the rendered rows to their target.
/// Returns the rendered bytes when the target is stdout.
pub fn execute(cfg: &RunConfig, default_dir: Option<&Path>) -> Result<Option<Vec<u8>>, CliError> {
    let rows = run(cfg)?;
    let bytes = output::render(&rows, cfg.output)?;
    match output::target(cfg, default_dir) {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(&path, &bytes).map_err(|e| CliError::Io {
                message: format!("{}: {e}", path.display()),
            })?;
            Ok(None)
        }
        None => Ok(Some(bytes)),
    }
}
