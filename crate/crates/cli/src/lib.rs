//! Command-line front end and HTTP service for the Tacton simulator.

pub mod commands;
pub mod error;
pub mod output;
pub mod service;

pub use error::CliError;
