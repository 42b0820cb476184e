//! Cut-set upper bounds on the rate at which a directed acyclic network can
//! compute a function of its source messages at a single sink, plus tools to
//! evaluate, verify and search small function-computing network codes.
//!
//! The main entry points are [`graph::parse_network`],
//! [`function::parse_function`], [`bound::full_report`] and the
//! [`code`] module.

pub mod bound;
pub mod cli;
pub mod code;
pub mod cut;
pub mod equivalence;
pub mod error;
pub mod field;
pub mod function;
pub mod graph;
pub mod sets;

pub use error::{Error, Result};
pub use function::TargetFunction;
pub use graph::Network;
pub use sets::{EdgeSet, SourceSet};

/// Size caps applied by enumeration routines. Exceeding one is an error,
/// never a silent truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Entries in any dense table: target functions, decoders, global
    /// evaluations.
    pub max_table: usize,
    /// Edge count above which cut enumeration refuses to run without a
    /// size bound.
    pub max_cut_edges: usize,
    /// Size of the ground set `A^I` of an equivalence partition, and of the
    /// `a_J x a_L` assignment space walked per strong partition.
    pub max_assignment_space: usize,
    /// Optional cap on the number of blocks of a strong partition.
    pub max_blocks: Option<usize>,
    /// Partial set partitions visited per cut before giving up.
    pub max_partition_steps: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_table: 1 << 20,
            max_cut_edges: 20,
            max_assignment_space: 1 << 16,
            max_blocks: None,
            max_partition_steps: 1 << 24,
        }
    }
}
