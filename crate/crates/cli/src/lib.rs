//! Configuration parsing and subcommand drivers behind the `chlab` binary.

pub mod commands;
pub mod config;
