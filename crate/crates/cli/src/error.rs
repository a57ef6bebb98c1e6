use std::fmt;
use std::path::Path;

use satisfice::pipeline::{EXIT_INVALID_DATA, EXIT_IO, EXIT_USAGE};

/// A failure with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl fmt::Display) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }

    pub fn data(message: impl fmt::Display) -> Self {
        Failure {
            code: EXIT_INVALID_DATA,
            message: message.to_string(),
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        Failure {
            code: EXIT_IO,
            message: format!("{}: {err}", path.display()),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub type CliResult<T> = Result<T, Failure>;

pub fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

pub fn write(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| Failure::io(path, e))
}

pub fn create_dir(path: &Path) -> CliResult<()> {
    std::fs::create_dir_all(path).map_err(|e| Failure::io(path, e))
}
