//! CSV and JSON rendering of result rows.

use std::path::{Path, PathBuf};

use crate::config::{OutputFormat, RunConfig};
use crate::error::CliError;
use crate::recipes::{Row, COLUMNS};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "MZI_OUT_DIR";

fn num(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// `Display` form, with negative zero printed as `0`.
fn fmt_f64(x: f64) -> String {
    (x + 0.0).to_string()
}

pub fn render(rows: &[Row], format: OutputFormat) -> Result<Vec<u8>, CliError> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| CliError::Io {
                message: e.to_string(),
            };
            w.write_record(COLUMNS).map_err(io)?;
            for row in rows {
                w.write_record([
                    row.recipe.to_string(),
                    row.probe.clone(),
                    fmt_f64(row.t),
                    num(row.r),
                    num(row.phi),
                    fmt_f64(row.value),
                    num(row.bound),
                    num(row.snl),
                    row.beats_snl.map(|b| b.to_string()).unwrap_or_default(),
                    row.flags.clone(),
                ])
                .map_err(io)?;
            }
            w.into_inner().map_err(|e| CliError::Io {
                message: e.to_string(),
            })
        }
        OutputFormat::Json => {
            let clean: Vec<Row> = rows
                .iter()
                .map(|r| Row {
                    value: r.value + 0.0,
                    bound: r.bound.map(|b| b + 0.0),
                    ..r.clone()
                })
                .collect();
            let mut out = serde_json::to_vec_pretty(&clean).map_err(|e| CliError::Io {
                message: e.to_string(),
            })?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

/// Where output goes: the configured path, else `<dir>/<name>.<ext>` under
/// the default directory, else stdout (`None`).
pub fn target(cfg: &RunConfig, default_dir: Option<&Path>) -> Option<PathBuf> {
    if let Some(p) = &cfg.out_path {
        return Some(p.clone());
    }
    let name = match cfg.command {
        crate::config::Command::Sweep => format!("sweep-{}", cfg.recipe()),
        c => c.to_string(),
    };
    default_dir.map(|d| d.join(format!("{name}.{}", cfg.output.extension())))
}
