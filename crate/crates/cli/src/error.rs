//! Failures split by exit code: bad input versus an unmet precondition of
//! the physics (oracle, sector, commutation).

use std::process::ExitCode;

#[derive(Debug)]
pub enum Failure {
    /// Config, flag or I/O problem. Exit code 1.
    Config(anyhow::Error),
    /// Oracle or precondition failure. Exit code 2.
    Precondition(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            Failure::Config(_) => ExitCode::from(1),
            Failure::Precondition(_) => ExitCode::from(2),
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Config(e) | Failure::Precondition(e) => e,
        }
    }
}

pub type Result<T> = std::result::Result<T, Failure>;

pub trait Classify<T> {
    fn config(self) -> Result<T>;
    fn precondition(self) -> Result<T>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for std::result::Result<T, E> {
    fn config(self) -> Result<T> {
        self.map_err(|e| Failure::Config(e.into()))
    }

    fn precondition(self) -> Result<T> {
        self.map_err(|e| Failure::Precondition(e.into()))
    }
}
