//! Command-line surface and session server for `wquiv`.

pub mod commands;
pub mod server;
