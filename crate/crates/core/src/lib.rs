//! Simulation and verification engine for two-strategy best-response dynamics
//! on periodic lattices.
//!
//! The crate is organised around a handful of small, composable pieces:
//!
//! * [`lattice`] — torus geometry, packed strategy configurations, payoff
//!   parameters, and the single-site update rule every dynamic shares.
//! * [`dynamics`] — the event-driven simulator (uniform-clock and active-set
//!   schedulers), coupled runs sharing one event stream, and the growth-model
//!   comparison process.
//! * [`reductions`] — deterministic operators on configurations: the
//!   block-union reduction, the synchronous best-response map and its closure,
//!   the coarse-grained view, and the corner-fill certificate.
//! * [`bootstrap`] — threshold growth (bootstrap percolation) on the coarse
//!   lattice, plus density sweeps with common random fields.
//! * [`meanfield`] — the nonspatial replicator-style model: regime
//!   classification, exact trajectories, and a numerical cross-check.

#![forbid(unsafe_code)]

pub mod bootstrap;
pub mod dynamics;
pub mod error;
pub mod lattice;
pub mod meanfield;
pub mod reductions;

pub use error::Error;
pub use lattice::{
    GameParams, LatticeGeometry, PayoffMatrix, SiteId, Strategy, StrategyClass, StrategyField,
};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
