//! Definition documents and the command runner behind the `orbitfin` binary.

pub mod commands;
pub mod document;
