//! Library side of the `epmod` command-line tool: operator files, reports,
//! the per-command analyses and the randomized property suite.

use std::fmt;
use std::path::PathBuf;

pub mod commands;
pub mod io;
pub mod report;
pub mod suite;

/// Exit status of a finished command.
pub const EXIT_PASS: u8 = 0;
pub const EXIT_DEFECT: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

/// Anything that stops a command before it can produce a verdict. Always
/// exit code 2.
#[derive(Debug)]
pub enum InputError {
    Io { path: PathBuf, message: String },
    Parse { path: PathBuf, message: String },
    Shape(String),
    Usage(String),
    /// The analysis itself could not run on this input.
    Numerical(epmod::Error),
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputError::Io { path, message } => write!(f, "{}: {message}", path.display()),
            InputError::Parse { path, message } => {
                write!(f, "{}: malformed operator file: {message}", path.display())
            }
            InputError::Shape(msg) => write!(f, "incompatible operator shape: {msg}"),
            InputError::Usage(msg) => write!(f, "{msg}"),
            InputError::Numerical(e) => write!(f, "analysis failed: {e}"),
        }
    }
}

impl std::error::Error for InputError {}

impl From<epmod::Error> for InputError {
    fn from(e: epmod::Error) -> Self {
        InputError::Numerical(e)
    }
}

/// 0 when every check passed, 1 when any check failed.
pub fn exit_code(report: &report::RunReport) -> u8 {
    if report.passed {
        EXIT_PASS
    } else {
        EXIT_DEFECT
    }
}
