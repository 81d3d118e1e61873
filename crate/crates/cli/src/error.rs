use std::fmt;

use serde::Serialize;

/// Failure of a command, mapped onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or inconsistent input.
    Config(String),
    Solver(travwave::Error),
    Io(String),
    /// The run finished but embedded checks failed.
    Checks(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(e) if is_input_error(e) => 2,
            _ => 1,
        }
    }

    fn category(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Solver(e) if is_input_error(e) => "config",
            CliError::Solver(_) => "solver",
            CliError::Io(_) => "io",
            CliError::Checks(_) => "checks",
        }
    }

    /// One-line JSON diagnostic for stderr.
    pub fn diagnostic(&self) -> String {
        #[derive(Serialize)]
        struct Diag<'a> {
            error: &'a str,
            message: String,
            exit_code: i32,
            #[serde(skip_serializing_if = "Option::is_none")]
            failed_checks: Option<&'a [String]>,
        }
        let d = Diag {
            error: self.category(),
            message: self.to_string(),
            exit_code: self.exit_code(),
            failed_checks: match self {
                CliError::Checks(v) => Some(v),
                _ => None,
            },
        };
        serde_json::to_string(&d).unwrap_or_else(|_| format!("{{\"error\":\"{}\"}}", self.category()))
    }
}

/// Errors caused by parameters the caller chose rather than by the numerics.
fn is_input_error(e: &travwave::Error) -> bool {
    use travwave::Error::*;
    matches!(
        e,
        InvalidParameter(_) | FluxOutOfRange { .. } | RegionMismatch { .. } | OutOfRange { .. } | NonPositiveHeadway(_)
    )
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Solver(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "{m}"),
            CliError::Checks(v) => write!(f, "{} embedded check(s) failed", v.len()),
        }
    }
}

impl std::error::Error for CliError {}

impl From<travwave::Error> for CliError {
    fn from(e: travwave::Error) -> Self {
        CliError::Solver(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
