//! Core algorithms for studying complete minors in the squares of graphs.
//!
//! The crate works on finite windows cut out of infinite vertex-transitive
//! families (grids, trees, ladders, jump lines). It can locate bundles of
//! disjoint rays leaving a window coherently, assemble a complete-minor model
//! in the square of the window from such a bundle, check minor containment
//! with an independent search, and evaluate clique-exclusion bounds derived
//! from quasi-isometry certificates.
//!
//! Everything here is allocation-only (`alloc`); IO, file formats and the
//! command line live in the companion `thicket` crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bounds;
pub mod builder;
pub mod families;
pub mod graph;
pub mod oracle;
pub mod rays;

mod flow;

pub use graph::{FiniteGraph, PathSeq, VertexId};
