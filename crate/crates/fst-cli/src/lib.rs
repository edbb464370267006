//! CLI frontend: serialization formats, the stylization pipeline and the
//! subcommand implementations behind the `fst` binary.

pub mod cli;
pub mod commands;
pub mod io;
pub mod pipeline;
pub mod report;
