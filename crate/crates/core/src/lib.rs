//! Slotted random-access simulation for C-RAN IoT networks.
//!
//! The crate covers the full experiment loop:
//!
//! - [`gscm`] builds a synthetic network layout and the ground-truth
//!   sector-device gain matrix from a one-bounce geometric channel model.
//! - [`ra`] simulates the slotted random-access protocol on top of that
//!   channel (Poisson arrivals, Bernoulli pilot activity, per-sector
//!   detection, central-unit report merging) and evaluates the closed-form
//!   operating-point formulas.
//! - [`classify`] turns central-unit reports into observation sets and runs
//!   two strong-link classifiers: an alpha-randomized baseline and a
//!   latent-factor matrix-completion method with a threshold test.
//! - [`eval`] computes detection/false-alarm rates, ROC curves with AUC,
//!   and model-vs-simulation throughput tables.
//! - [`config`], [`io`] and [`pipeline`] provide the reproducible experiment
//!   harness: flat key-value configs, CSV artifacts, labeled RNG substreams
//!   and a deterministic end-to-end run.

pub mod classify;
pub mod config;
pub mod error;
pub mod eval;
pub mod geom;
pub mod gscm;
pub mod io;
pub mod pipeline;
pub mod ra;
pub mod rng;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
