//! Finite trees with brute-force ranks and the structurally certified
//! witness trees of the construction.

mod finite;
mod structured;

pub use finite::{finite_rank, FiniteTree};
pub use structured::{branch_component, map_into, stage_tree, NodeKey, Shape, StructuredTree};
