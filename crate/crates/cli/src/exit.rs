//! Exit codes and the error type that carries them.

use std::path::{Path, PathBuf};

/// Process exit codes. These are part of the public interface.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum Exit {
    /// Success; for `attack`, the defense held.
    Ok = 0,
    /// I/O, parse or usage error.
    Failure = 1,
    /// `lock`: not enough disjoint sub-circuits for the key budget.
    InsufficientCandidates = 2,
    /// `lock`: the activated design differs from the input.
    LockEquivalence = 3,
    /// `attack`/`verify`: iteration or time budget exhausted.
    Budget = 4,
    /// `verify`: the activated design differs from the original.
    VerifyEquivalence = 5,
    /// `verify`: one key unlocks every input.
    UniversalKey = 6,
    /// `attack`: a correct key was recovered.
    KeyFound = 10,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("{message}")]
    Coded { code: Exit, message: String },
}

impl CliError {
    pub fn code(&self) -> Exit {
        match self {
            CliError::Io { .. } | CliError::Parse { .. } => Exit::Failure,
            CliError::Coded { code, .. } => *code,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn parse(path: &Path, message: impl std::fmt::Display) -> Self {
        CliError::Parse {
            path: path.to_path_buf(),
            message: message.to_string(),
        }
    }

    pub fn failure(message: impl std::fmt::Display) -> Self {
        Self::coded(Exit::Failure, message)
    }

    pub fn coded(code: Exit, message: impl std::fmt::Display) -> Self {
        CliError::Coded {
            code,
            message: message.to_string(),
        }
    }
}
