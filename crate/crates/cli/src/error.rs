use std::path::PathBuf;

use ldi_core::Error as CoreError;
use thiserror::Error;

/// Process exit codes, one per error class.
pub mod exit {
    pub const OK: i32 = 0;
    /// Bad command line (reported by the argument parser).
    pub const USAGE: i32 = 2;
    pub const CONFIG: i32 = 3;
    pub const UNKNOWN_CLASS: i32 = 4;
    pub const MISSING_INPUT: i32 = 5;
    pub const IO: i32 = 6;
    pub const FORMAT: i32 = 7;
    pub const MISMATCH: i32 = 8;
    pub const NUMERIC: i32 = 9;
}

pub const EXIT_CODES_HELP: &str = "\
Exit codes:
  0  success
  2  bad command line
  3  invalid configuration or pose string
  4  unknown class name
  5  missing input file or directory
  6  I/O failure (e.g. output not writable)
  7  malformed input data (PNG, JSON, LDI container, format version)
  8  mismatched inputs (dimensions, dataset contents, empty comparison set)
  9  numeric or geometric failure (depth out of range, camera outside room)";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("malformed pose {0:?}: expected six comma-separated numbers tx,ty,tz,rx,ry,rz")]
    Pose(String),
    #[error("unknown class {name:?}; available classes: {}", available.join(", "))]
    UnknownClass { name: String, available: Vec<String> },
    #[error("datasets do not match: {0}")]
    Mismatch(String),
    #[error("missing input {0}")]
    Missing(PathBuf),
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Pose(_) | CliError::Config(_) => exit::CONFIG,
            CliError::UnknownClass { .. } => exit::UNKNOWN_CLASS,
            CliError::Mismatch(_) => exit::MISMATCH,
            CliError::Missing(_) => exit::MISSING_INPUT,
            CliError::Core(e) => match e {
                CoreError::Config(_) | CoreError::TooSmall { .. } => exit::CONFIG,
                CoreError::MissingFile(_) => exit::MISSING_INPUT,
                CoreError::Io { source, .. } if source.kind() == std::io::ErrorKind::NotFound => {
                    exit::MISSING_INPUT
                }
                CoreError::Io { .. } => exit::IO,
                CoreError::Png { .. }
                | CoreError::Json { .. }
                | CoreError::Version { .. }
                | CoreError::BadMagic
                | CoreError::Truncated(_) => exit::FORMAT,
                CoreError::Dimension { .. } | CoreError::EmptyMask => exit::MISMATCH,
                _ => exit::NUMERIC,
            },
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
