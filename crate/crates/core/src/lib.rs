//! Progressive tool disclosure over a hierarchical skill tree.
//!
//! Tools are grouped into kits. An agent first sees only a table of kits,
//! opens a kit to read its catalog of one-line briefs, reads a tool's full
//! document, and only then may call it. The crate runs that loop (and the
//! Flat, RAG and catalog-first baselines) against a scripted mock
//! environment, scores the resulting trajectories, and measures how many
//! prompt tokens each paradigm spends.

pub mod bundled;
pub mod cli;
pub mod engine;
pub mod environment;
pub mod harness;
pub mod metrics;
pub mod policy;
pub mod registry;
pub mod retrieval;
