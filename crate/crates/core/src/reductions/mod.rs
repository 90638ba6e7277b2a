//! Block-level reductions of strategy fields.
//!
//! The fine lattice is partitioned into aligned `2^d` blocks (sides are
//! even, so the tiling is exact and no block wraps). [`sparse_reduce`]
//! keeps exactly the fully-aligned strategy-1 blocks; [`hypercubic_view`]
//! records the same information as an occupancy field on the half-size
//! coarse lattice. The synchronous [`response_map`] and its closure drive
//! deterministic growth arguments, and [`corner_fill_certificate`] checks
//! the concrete corner-filling schedules those arguments rest on.

mod coarse;
mod corner;
mod response;

pub use coarse::{hypercubic_view, sparse_reduce, CoarseField, CoarseGeometry};
pub use corner::{corner_fill_certificate, CornerFillReport, CornerStage};
pub use response::{
    response_closure, response_closure_with_depth, response_iterate, response_map,
};
