//! The constructed lattices: base sequences, successor renormings and limit
//! stages with symbolic tails.

pub mod basis;
mod element;
pub mod sequence;
mod space;
mod tail;
mod vector;

pub use basis::{dense_base, dominating, pi_basis, z_seq};
pub use element::{Element, NormBound, Order, DEFAULT_SAMPLE_BUDGET};
pub use space::SpaceDescriptor;
pub use tail::{BranchRef, TailExpr};
pub use vector::{LimVector, Seq, Vector};
