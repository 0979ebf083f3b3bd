//! Library side of the `subopt` command-line tool.

pub mod certificate;
pub mod commands;
pub mod config;
