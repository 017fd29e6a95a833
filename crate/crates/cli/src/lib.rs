//! Library surface of the `mrex` command-line runner: scenario schema,
//! CSV builders and the batch execution helpers. The binary in `main.rs`
//! is a thin argument-parsing layer over these.

pub mod csv;
pub mod error;
pub mod runner;
pub mod scenario;
