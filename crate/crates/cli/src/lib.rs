//! Library side of the humsim command-line tool: configuration documents,
//! CSV interchange, path grammar, chart rendering and the subcommand bodies.

pub mod chart;
pub mod commands;
pub mod config;
pub mod csvio;
pub mod pathspec;
