//! Exact-arithmetic workbench for the ordinal-indexed family of separable
//! Banach lattices failing the α-Fatou property: the lattices themselves,
//! their witness trees and ranks, the ordinal games, and checkers for the
//! associated convergence notions.

pub mod construction;
pub mod convergence;
pub mod error;
pub mod game;
pub mod lattice;
pub mod ordinal;
pub mod poly;
pub mod psi;
pub mod rational;
pub mod report;
pub mod trees;

pub use construction::{build, verify, Budgets, Bundle, BundleFile};
pub use error::{Error, Result};
pub use game::{play, Player, StrategyI, StrategyII, Transcript};
pub use lattice::sequence::{SequenceSpec, TailRule};
pub use lattice::{Element, NormBound, Order, SpaceDescriptor};
pub use ordinal::Ordinal;
pub use psi::{psi_certify, psi_check, PsiVerdict};
pub use rational::Rational;
pub use report::{Check, Report, Verdict};
pub use trees::{stage_tree, FiniteTree, NodeKey, StructuredTree};
