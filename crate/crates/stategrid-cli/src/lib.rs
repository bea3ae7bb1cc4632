//! Textual persistence and demonstration drivers for the `stategrid`
//! command line tool.

pub mod demo;
pub mod doc;
