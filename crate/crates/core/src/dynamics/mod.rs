//! Event-driven simulation of the asynchronous best-response dynamics.
//!
//! Each site carries an independent rate-one clock. The engine realises the
//! resulting event sequence in aggregated form — an exponential gap at the
//! total rate of the eligible set, then a uniform pick inside it — which is
//! equal in law to per-site clocks and lets the scheduler shrink the eligible
//! set to the sites that would actually move.

mod active_set;
mod engine;
mod report;
mod richardson;
mod stream;

pub use engine::{
    simulate, simulate_active_set, simulate_active_set_observed, simulate_coupled,
    simulate_coupled_observed, simulate_observed, CoupledObserver, SimObserver,
};
pub use report::{RunReport, SeriesSample};
pub use richardson::{
    check_richardson_domination, richardson_init, simulate_richardson, DominationReport,
    InfectionField, RichardsonReport,
};
pub use stream::{derive_seed, Event, EventStream};
