//! Command-line front end for tdmap and the read-only report API.

pub mod api;
pub mod cli;
