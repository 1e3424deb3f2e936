//! Experiment driver around the `displace` library: each subcommand runs one
//! experiment from a TOML config (defaults match the shipped presets) and
//! writes hash-stamped CSVs plus a JSON summary.

pub mod commands;
pub mod config;
pub mod report;
