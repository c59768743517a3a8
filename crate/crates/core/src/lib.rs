//! A self-contained real-time-strategy laboratory: a deterministic grid-combat
//! engine with durative simultaneous actions, weighted evaluation functions
//! with online per-component weight adaptation, three time-budgeted planners,
//! and a seat-balanced round-robin tournament harness.
//!
//! Everything is deterministic given a seed; wall-clock budgets can be
//! replaced by virtual node-count budgets so searches replay bit-identically.

pub mod adaptive;
pub mod config;
pub mod eval;
pub mod game;
pub mod search;
pub mod tournament;

#[cfg(test)]
pub(crate) mod testutil;
