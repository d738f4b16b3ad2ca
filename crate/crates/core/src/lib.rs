//! Simulation engine for finite-precision non-contextual hidden-variable
//! models.
//!
//! The crate covers:
//!
//! - [`quantum`]: dense complex linear algebra, states, projective and POVM
//!   decompositions, and the exact Born-rule oracle.
//! - [`ks`]: vector sets, orthogonal bases, KS-colourings, operator
//!   colourings and a backtracking uncolourability search with a shipped,
//!   certified catalogue.
//! - [`gz`]: exact parity colouring of rational unit vectors in three
//!   dimensions and a bounded enumeration of rational orthogonal triads.
//! - [`ck`]: finite sub-models (an ordered list of mutually projector-disjoint
//!   decompositions plus a precision), first-match lookup, non-contextual
//!   hidden states, sequential measurement, calibration and breakdown.
//! - [`sbz`]: the knob-setting black-box test and its `epsilon < 1/N` verdict.
//! - [`experiments`]: the two-qubit φ+ scenario under the Born oracle or a
//!   sub-model, with apparatus jitter.
//! - [`app`]: the `ncsim` command line, run logs and replay.
//!
//! Runnable walkthroughs live in `examples/` (`cargo run -p ncsim --example <name>`).

pub mod app;
pub mod ck;
mod error;
pub mod experiments;
pub mod gz;
pub mod ks;
pub mod quantum;
pub mod sbz;
pub mod seeds;
pub mod stats;

pub use error::{Error, Result};

/// Default absolute tolerance for operator identities (floating-point noise,
/// not physical precision).
pub const DEFAULT_TOL: f64 = 1e-9;
