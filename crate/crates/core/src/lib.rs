//! Weighted δ-graphs, their tracial covers and the loop algebras built on them.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod actions;
pub mod builders;
pub mod cover;
pub mod graph;
pub mod invariants;
pub mod loop_algebra;
pub mod weights;
