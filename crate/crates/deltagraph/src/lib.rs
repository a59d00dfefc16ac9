//! File format, DOT export, example builders and the command-line driver for
//! fair and balanced δ-graphs.

pub mod builder;
pub mod cli;
pub mod dot;
pub mod format;

pub use deltagraph_core::{actions, builders, cover, graph, invariants, loop_algebra, weights};
