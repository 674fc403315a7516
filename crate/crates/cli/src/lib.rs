//! Library side of the `octavic` command-line tool.

pub mod commands;
pub mod config;
pub mod error;
pub mod parse;
pub mod report;
pub mod suites;
