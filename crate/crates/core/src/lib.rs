//! Fully dynamic graph sparsification.
//!
//! This crate maintains `(1 ± ε)` cut and spectral sparsifiers of a weighted
//! undirected multigraph under edge insertions and deletions, and layers a
//! dynamic approximate bipartite minimum s-t cut on top of them.
//!
//! The building blocks are organized bottom-up:
//!
//! * [`graph`] — the dynamic multigraph, update events and cut arithmetic,
//! * [`forest`] — a fully dynamic minimum/maximum spanning forest with at
//!   most one replacement edge per update,
//! * [`bundle`] — t-bundle spanning-forest chains with one-change recourse,
//! * [`cut`] — the dynamic cut sparsifier chain, its forest decomposition
//!   and the two-instance wrapper for unbounded update sequences,
//! * [`spanner`] — a decremental spanner with the monotonicity property,
//! * [`spectral`] — the decremental spectral sparsifier chain and the
//!   decremental-to-fully-dynamic reduction,
//! * [`elim`] — star elimination onto a vertex cover and branch vertex
//!   cover maintenance,
//! * [`vertex`] — terminal cut sparsification by heavy-vertex sampling,
//! * [`mincut`] — the end-to-end dynamic approximate min s-t cut,
//! * [`oracle`] — brute-force ground truth used by the verification suite.

pub mod bundle;
pub mod cut;
pub mod elim;
pub mod error;
pub mod forest;
pub mod graph;
pub mod mincut;
pub mod oracle;
pub mod rng;
pub mod spanner;
pub mod spectral;
pub mod vertex;

pub use error::{Error, Result};
pub use graph::{
    ChangeSet, DynamicGraph, EdgeId, UpdateEvent, VertexId, Weight, WeightedEdge,
};
