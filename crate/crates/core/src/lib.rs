//! Hybrid firefly / sperm-swarm optimization with Newton-Raphson refinement.
//!
//! The crate bundles the optimizers (FA, SSO, HFASSO, HFASSON), the classical
//! 23-function benchmark suite, an experiment harness with Friedman ranking,
//! and an energy-detection spectrum-sensing simulator whose threshold is tuned
//! by HFASSON.

pub mod bench;
pub mod crvanet;
pub mod error;
pub mod friedman;
pub mod harness;
pub mod newton;
pub mod optimizer;

pub use error::{Error, Result};

/// Random stream used everywhere a seeded, reproducible draw is needed.
pub type SimRng = rand_chacha::ChaCha8Rng;
