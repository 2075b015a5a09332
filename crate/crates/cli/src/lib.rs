//! Library side of the `multischmidt` command: state files, analysis
//! reports and the reference table.

pub mod report;
pub mod reproduce;
pub mod statefile;

pub use report::{analyze, render_table, AnalysisReport};
pub use statefile::StateFile;
