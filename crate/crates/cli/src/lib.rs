//! Command-line front end for `finspace`: the `.poset` document format,
//! DOT output and the `finspace` subcommands.

pub mod app;
pub mod document;
pub mod dot;

pub use app::{run, Outcome};
