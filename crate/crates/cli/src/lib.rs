//! Library side of the `lorentz` command-line tool: file formats, run
//! manifests, deterministic parallel drivers, and the subcommand
//! implementations. The binary in `main.rs` is a thin clap wrapper over
//! these.

pub mod commands;
pub mod formats;
pub mod manifest;
pub mod runner;
