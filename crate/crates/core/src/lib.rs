//! Executable companion to the uniform Turán density of tight 3-uniform cycles.
//!
//! The crate is organised by subject:
//!
//! * [`hypergraph`] – labelled 3-uniform hypergraphs, tight cycles and containment.
//! * [`palette`] – host hypergraphs built from pair colourings and a palette
//!   `P ⊆ [k]^3`, together with exhaustive / sampled freeness checks.
//! * [`certificate`] – vertex orderings with red/green/blue pair colourings that
//!   witness zero uniform Turán density.
//! * [`partitioned`] – `n`-partitioned hypergraphs, triad densities, the degree
//!   notions and embeddings.
//! * [`intersection`] – a witness-search engine for choosing common
//!   representatives from families of candidate sets.
//! * [`opt`] – the 27-variable problem whose optimum is 4/27, its inequality
//!   variant, a multistart maximizer and the bounding inequalities.
//! * [`schedules`] – symbolic embedding schedules of tight cycles and their
//!   verification against the guaranteed edge patterns.
//!
//! Vertices are 1-based throughout to keep `[n] = {1, …, n}` literal.

pub mod certificate;
pub mod error;
pub mod hypergraph;
pub mod intersection;
pub mod opt;
pub mod palette;
pub mod partitioned;
pub mod rng;
pub mod schedules;

pub use error::{Error, Result};
pub use hypergraph::Hypergraph3;
