//! Torus geometry, strategy configurations, payoff parameters, and the
//! single-site update rule shared by every dynamic in the crate.

mod bits;
mod field;
mod game;
mod geometry;

pub(crate) use bits::Bits;
pub use field::{Strategy, StrategyField};
pub use game::{
    flip_target, flip_target_at, is_absorbing, payoff_gap, payoff_levels, GameParams,
    PayoffMatrix, StrategyClass,
};
pub use geometry::{LatticeGeometry, SiteId};
