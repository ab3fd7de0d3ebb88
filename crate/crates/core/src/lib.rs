//! Hierarchy-blocked graph layout toolkit.
//!
//! The central operation takes an in-memory graph plus a declared memory
//! hierarchy (an increasing ladder of block sizes such as cache line, page,
//! and huge page) and copies the graph into a fresh address space so that the
//! copy is blocked for *every* level at once: nodes that are close in the
//! graph land in the same block at each granularity. Around that sit seeded
//! graph generators, traversal workloads that emit address traces, a
//! multi-level LRU cache simulator for scoring layouts, and checkers for the
//! transfer bounds the blocked layouts are supposed to satisfy.

pub mod bounds;
pub mod generators;
pub mod hierarchy;
pub mod layout;
pub mod model;
pub mod sim;
pub mod workloads;

#[cfg(feature = "testkit")]
pub mod testkit;

mod error;

pub use error::Error;
pub use hierarchy::{LevelSpec, MemoryHierarchy, PAPER_PRESET};
pub use layout::{LayoutAlgo, LayoutOptions, LayoutResult, Region};
pub use model::{
    Access, AccessTrace, Footprints, GraphKind, GraphModel, NodeId, OpCounters, SizeModel, Slot,
};
