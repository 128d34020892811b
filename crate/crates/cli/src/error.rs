use std::fmt;

use serde::Serialize;
use serde_json::json;

use crate::validate::Violation;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad configuration, flags, or unreadable input.
    Config {
        message: String,
        violations: Vec<Violation>,
    },
    /// The computation itself failed (cutoff, degeneracy, root finding).
    Numeric {
        kind: &'static str,
        message: String,
    },
    Io {
        message: String,
    },
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config {
            message: message.into(),
            violations: Vec::new(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Io { .. } => 2,
            CliError::Numeric { .. } => 3,
        }
    }

    /// Single-line JSON record for stderr.
    pub fn record(&self) -> String {
        #[derive(Serialize)]
        struct Record<'a> {
            error: &'a str,
            kind: &'a str,
            message: &'a str,
            #[serde(skip_serializing_if = "<[Violation]>::is_empty")]
            violations: &'a [Violation],
            exit_code: i32,
        }
        let (error, kind, message, violations): (&str, &str, &str, &[Violation]) = match self {
            CliError::Config {
                message,
                violations,
            } => ("config", "config", message, violations),
            CliError::Numeric { kind, message } => ("numeric", kind, message, &[]),
            CliError::Io { message } => ("io", "io", message, &[]),
        };
        serde_json::to_string(&Record {
            error,
            kind,
            message,
            violations,
            exit_code: self.exit_code(),
        })
        .unwrap_or_else(|_| json!({ "error": error, "message": message }).to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { message, .. } | CliError::Io { message } => f.write_str(message),
            CliError::Numeric { message, .. } => f.write_str(message),
        }
    }
}

impl std::error::Error for CliError {}

impl From<mzi_core::Error> for CliError {
    fn from(e: mzi_core::Error) -> Self {
        use mzi_core::Error as E;
        let kind = match &e {
            E::InvalidCutoff(_)
            | E::InvalidProbe(_)
            | E::InvalidParameter(_)
            | E::InsufficientReps(_) => return CliError::config(e.to_string()),
            E::CutoffOverflow { .. } => "cutoff-overflow",
            E::DimensionMismatch { .. } => "dimension-mismatch",
            E::MixedState => "mixed-state",
            E::DegenerateProbability { .. } => "degenerate-probability",
            E::NoRoot { .. } => "no-root",
        };
        CliError::Numeric {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io {
            message: e.to_string(),
        }
    }
}
