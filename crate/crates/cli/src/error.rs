//! Failure taxonomy shared by all subcommands.
//!
//! Everything a user can fix without rerunning (bad flags, malformed
//! scenarios, configs that fail the simulator's preconditions) is a
//! validation failure and exits 2; failures of the run itself (I/O while
//! writing artifacts, solver errors) exit 3.

use std::fmt;

/// Process exit code for validation failures.
pub const EXIT_VALIDATION: i32 = 2;
/// Process exit code for runtime failures.
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Runtime(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Validation(_) => EXIT_VALIDATION,
            Failure::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Validation(msg) => write!(f, "validation error: {msg}"),
            Failure::Runtime(msg) => write!(f, "runtime error: {msg}"),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(format!("io: {e}"))
    }
}

/// Simulation construction checks preconditions, so its errors are the
/// user's to fix; solver errors surfacing later are runtime failures.
impl From<mrex::sim::SimError> for Failure {
    fn from(e: mrex::sim::SimError) -> Self {
        match e {
            mrex::sim::SimError::Slam(e) => Failure::Runtime(e.to_string()),
            other => Failure::Validation(other.to_string()),
        }
    }
}

impl From<mrex::metrics::MetricsError> for Failure {
    fn from(e: mrex::metrics::MetricsError) -> Self {
        Failure::Runtime(e.to_string())
    }
}
