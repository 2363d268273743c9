//! File formats, DOT rendering, and experiment runners around the core
//! toolkit. Everything here needs std; the algorithms live in thicket-core.

pub mod dot;
pub mod experiments;
pub mod formats;
