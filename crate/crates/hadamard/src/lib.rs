//! JSON formats, command line and parallel drivers for `hadamard-core`.

pub mod cli;
pub mod json;
pub mod parallel;

pub use hadamard_core as core;
