//! Double reconciliation of protein trees, gene trees and species trees.
//!
//! The crate is `no_std` (it needs `alloc`) and contains every algorithm:
//!
//! - [`tree`]: rooted binary trees, Newick text, LCA queries, restriction,
//!   canonical forms and exhaustive topology enumeration.
//! - [`reconcile`]: LCA-reconciliation of a gene tree with a species tree and
//!   of a protein tree with a gene tree, loss placement, the nine double
//!   costs and homology classification.
//! - [`mindrgt`]: the local-rearrangement heuristic that corrects a gene tree
//!   guided by a protein tree and a species tree, plus an exhaustive solver.
//! - [`mindrpgt`]: span partitions and reconstruction of a protein tree from
//!   its maximal creation-free subtrees.
//! - [`simulate`]: a seeded generator of species/gene/protein tree triples.
//!
//! File handling and the command line live in the companion `drecon` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod bitset;
pub mod error;
pub mod mindrgt;
pub mod mindrpgt;
pub mod reconcile;
pub mod simulate;
pub mod tree;

#[cfg(test)]
mod testutil;

pub use error::{Error, ParseErrorKind, Result};
pub use reconcile::{CostSpec, GeneCost, LeafMapping, ProteinCost, Reconciliation};
pub use tree::{Event, NodeId, PhyloTree};
