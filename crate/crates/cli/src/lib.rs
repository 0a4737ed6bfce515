//! File formats and report rendering for the `vcsp` command-line tool.

pub mod format;
pub mod report;
