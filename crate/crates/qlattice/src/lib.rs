//! Ensemble runners, comparison statistics, file formats, and the
//! command-line surface sitting on top of [`qlattice_core`].
//!
//! The core crate owns the physics; this crate owns everything that needs
//! an operating system: parallel ensemble execution with deterministic
//! merges, goodness-of-fit reports against the closed-form laws, CSV/JSON
//! emission, scenario files, and the exact-arithmetic certification
//! report.

pub mod ensemble;
pub mod output;
pub mod scenario;
pub mod stats;
pub mod verify;

pub use qlattice_core as core;
