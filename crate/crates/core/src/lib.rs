//! Spreadsheet auditing over the cell dependency graph.

pub mod formula;
pub mod workbook;
pub mod depgraph;
pub mod tools;
pub mod report;
pub mod analysis;
pub mod synth;
