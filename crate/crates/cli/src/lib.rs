//! Command-line front end: map files, output rendering and dispatch.

pub mod mapfile;
pub mod output;
pub mod run;
