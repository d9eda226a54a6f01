//! Command-line front end for the `coherence` crate: matrix file I/O,
//! detection commands, bounds reports and parameter scans.

pub mod commands;
pub mod files;
pub mod report;
