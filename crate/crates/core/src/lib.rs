//! Star complexity of graphs.
//!
//! A graph on `n` labeled vertices is built from the elementary stars
//! `S_i` (all edges at vertex `i`) by union and intersection. This crate
//! finds exact values by exhaustive stack-machine search, upper bounds by
//! greedy factoring and monotone circuit optimization, and an
//! information-based complexity from automorphism counting.

pub mod automorphism;
pub mod circuit;
pub mod edgespace;
pub mod experiments;
pub mod greedy;
pub mod ibc;
pub mod oracle;
pub mod rpn;

pub use automorphism::{aut_order, canonical_certificate, isomorphism, AutResult, OrderedPartition};
pub use edgespace::{er_random, EdgeSet, GraphError, GraphUniverse};
