//! Horn knowledge compilation with incremental belief change.
//!
//! A knowledge base is kept as a pair of Horn bounds, a lower bound (core)
//! that implies it and an upper bound (envelope) implied by it. Updates move
//! both bounds; single Horn clause updates take a linear-time path, anything
//! else goes through exact model-set semantics on small universes.

pub mod change;
pub mod error;
pub mod fastpath;
pub mod formula;
pub mod hornsat;
pub mod recompile;
pub mod reductions;
pub mod semantics;
pub mod verify;

pub use error::{Error, Result};
