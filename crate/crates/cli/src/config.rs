//! Run configuration: a JSON document, optionally overridden by flags.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use mzi_core::{Generator, ProbeSpec};
use serde::{Deserialize, Serialize};

pub const DEFAULT_M: u64 = 10_000;
pub const DEFAULT_REPS: u64 = 500;
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Qfi,
    Qfim,
    Crb,
    PhaseAveraged,
    GaussianCfi,
    Campaign,
    Sweep,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Qfi,
        Command::Qfim,
        Command::Crb,
        Command::PhaseAveraged,
        Command::GaussianCfi,
        Command::Campaign,
        Command::Sweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Qfi => "qfi",
            Command::Qfim => "qfim",
            Command::Crb => "crb",
            Command::PhaseAveraged => "phase-averaged",
            Command::GaussianCfi => "gaussian-cfi",
            Command::Campaign => "campaign",
            Command::Sweep => "sweep",
        }
    }

    /// Commands that run the squeezer / anti-squeezer detection scheme.
    pub fn is_gaussian(self) -> bool {
        matches!(self, Command::GaussianCfi | Command::Campaign)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(rename = "T")]
    pub t: Vec<f64>,
    /// Squeeze parameters; replaces the probe's own `r` when non-empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub r: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub phi: Vec<f64>,
}

fn default_generator() -> Generator {
    Generator::OneArm
}
fn default_m() -> u64 {
    DEFAULT_M
}
fn default_reps() -> u64 {
    DEFAULT_REPS
}
fn default_tail_tol() -> f64 {
    DEFAULT_TAIL_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    /// The recipe evaluated by `sweep`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_command: Option<Command>,
    pub probe: ProbeSpec,
    #[serde(default = "default_generator")]
    pub generator: Generator,
    pub grid: Grid,
    #[serde(default)]
    pub output: OutputFormat,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_m")]
    pub m: u64,
    #[serde(default = "default_reps")]
    pub reps: u64,
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_path: Option<PathBuf>,
}

impl RunConfig {
    /// The recipe actually evaluated at each grid point.
    pub fn recipe(&self) -> Command {
        match self.command {
            Command::Sweep => self.sweep_command.unwrap_or(Command::Crb),
            c => c,
        }
    }
}

/// Rounds to 15 significant digits so decimal grids land on their decimal
/// values (`0.5`, not `0.49999999999999994`).
fn snap(x: f64) -> f64 {
    format!("{x:.14e}").parse().unwrap_or(x)
}

/// Parses a grid axis: `start:stop:count` (inclusive, evenly spaced) or a
/// comma-separated list.
pub fn parse_axis(s: &str) -> Result<Vec<f64>, String> {
    let num = |x: &str| -> Result<f64, String> {
        let v: f64 = x
            .trim()
            .parse()
            .map_err(|_| format!("not a number: `{x}`"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("not finite: `{x}`"))
        }
    };
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, n] => {
            let (a, b) = (num(a)?, num(b)?);
            let n: usize = n
                .trim()
                .parse()
                .map_err(|_| format!("bad point count `{n}`"))?;
            match n {
                0 => Err("a range needs at least one point".into()),
                1 => Ok(vec![a]),
                _ => Ok((0..n)
                    .map(|k| snap(a + (b - a) * k as f64 / (n - 1) as f64))
                    .collect()),
            }
        }
        [_] => s.split(',').map(num).collect(),
        _ => Err(format!("expected `start:stop:count` or a list, got `{s}`")),
    }
}
