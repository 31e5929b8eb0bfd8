//! Label Cover and Min-Rep instances with large (super)girth, and the
//! gadget reduction from Min-Rep to the basic k-spanner problem.
//!
//! The crate is organised as a pipeline:
//!
//! 1. [`constructions`] builds a Label Cover instance from a 3SAT(5) formula,
//!    regularises it by duplication and applies parallel repetition.
//! 2. [`subsample`] keeps every superedge independently with probability
//!    `p = α·log2|Σ_A| / d` and strips superedges that lie on short cycles.
//! 3. [`label_cover`] expands the result into a Min-Rep graph.
//! 4. [`spanner`] builds the spanner gadget graph and moves between
//!    REP-covers and k-spanners in both directions.
//!
//! [`oracles`] holds exhaustive solvers used as ground truth on tiny
//! instances, and [`format`] the line-oriented text formats.

pub mod constructions;
pub mod error;
pub mod format;
pub mod graph;
pub mod label_cover;
pub mod oracles;
pub mod pipeline;
pub mod rng;
pub mod spanner;
pub mod subsample;

pub use error::{Error, Result};
pub use graph::{Distance, EdgeId, Graph, VertexId};
pub use label_cover::{
    labeling_to_repcover, minrep_expand, LabelCoverInstance, Labeling, MinRepInstance, Relation,
    RepCover, RepMember, Side, SuperEdge, Symbol,
};
