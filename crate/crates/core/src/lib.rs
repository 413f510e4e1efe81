//! Coloring engine and verification lab for nearly disjoint graph unions.

pub mod error;
pub mod finisher;
pub mod format;
pub mod hypergraph;
pub mod instance;
pub mod lab;
pub mod nibble;
pub mod normalizer;
pub mod pipeline;
pub mod rng;
pub mod schedule;

pub use error::{Error, Result};
pub use instance::{Assignment, Color, GraphSpec, Mode, PartialColoring, UnionInstance};
