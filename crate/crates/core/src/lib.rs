//! Exact counters for parameterised walk, cycle-cover, model-counting,
//! homomorphism, determinant and branching-program problems, with the
//! parsimonious reductions between them.

pub mod bp;
pub mod cli;
pub mod cnf;
pub mod error;
pub mod fo;
pub mod formats;
pub mod gen;
pub mod graph;
pub mod hom;
pub mod pdet;
pub mod reductions;
pub mod selftest;
pub mod walk;

pub use error::{Error, Result};
pub use graph::{CountTable, DirectedGraph, VertexColouring, WalkCount};
