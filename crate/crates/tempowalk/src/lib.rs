//! Snapshot-level embeddings for discrete temporal graphs.
//!
//! The pipeline: parse a timestamped edge list into snapshots, run
//! layer-descending second-order random walks over the snapshot stack, train
//! paragraph vectors over the walk sentences (one document per snapshot), and
//! rank snapshots by embedding similarity. A scalability harness sweeps
//! synthetic graphs through the same pipeline.

pub mod alias;
pub mod bench;
pub mod corpus;
pub mod embed;
pub mod error;
pub mod eval;
pub mod graph;
pub mod rng;
pub mod walk;

pub use corpus::{Sentence, WalkCorpus};
pub use error::{Error, Result};
pub use graph::{bin_timestamps, build_snapshots, parse_edge_list, BinScheme, ParseOptions, Snapshot, TemporalEdge, TemporalGraph};
pub use walk::{generate_walks, LayeredPosition, StepDistribution, TableMode, Walk, WalkConfig};
