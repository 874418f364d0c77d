use std::fmt;

use spanforge::Error;

/// A failed command and the exit code it maps to.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or a lemma that does not apply to the given file.
    Usage(String),
    /// Unreadable, unparsable or inconsistent input.
    Input(String),
    /// A check could not be carried out on this instance.
    Verification(String),
    /// A numeric solve failed.
    Numeric(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Input(_) => 2,
            Failure::Verification(_) => 3,
            Failure::Numeric(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m)
            | Failure::Input(m)
            | Failure::Verification(m)
            | Failure::Numeric(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        match e {
            Error::Calibration(_) => Failure::Verification(message),
            Error::Infeasible { .. } | Error::NoConvergence { .. } => Failure::Numeric(message),
            _ => Failure::Input(message),
        }
    }
}

pub type Outcome<T> = Result<T, Failure>;
