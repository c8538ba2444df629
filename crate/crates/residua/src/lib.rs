//! File formats, parallel drivers and the command-line front end for
//! `residua-core`.

pub mod cli;
pub mod drivers;
pub mod formats;
