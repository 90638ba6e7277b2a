//! Payoff parameters and the single-site update rule.
//!
//! A site's payoff for playing strategy `i` against its neighbourhood is
//! `a_i1 * N1 + a_i2 * N2`, where `N1`/`N2` count neighbours playing each
//! strategy. Only the two differences `a1 = a11 - a21` and `a2 = a22 - a12`
//! matter for the sign of the payoff gap, so the dynamics run on that reduced
//! pair. Comparisons are exact floating-point comparisons: a tie means the
//! site has no strict best response and stays put. Callers who need exact tie
//! behaviour should pick parameters whose products with small integers are
//! exactly representable (quarter-integers, say).

use super::field::{Strategy, StrategyField};
use super::geometry::SiteId;
use crate::error::Error;
use crate::Result;

/// Full 2x2 payoff matrix, row = own strategy, column = neighbour strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffMatrix {
    a11: f64,
    a12: f64,
    a21: f64,
    a22: f64,
}

impl PayoffMatrix {
    pub fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Result<Self> {
        for v in [a11, a12, a21, a22] {
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "payoff entries must be finite, got {v}"
                )));
            }
        }
        Ok(Self { a11, a12, a21, a22 })
    }

    pub fn a11(&self) -> f64 {
        self.a11
    }
    pub fn a12(&self) -> f64 {
        self.a12
    }
    pub fn a21(&self) -> f64 {
        self.a21
    }
    pub fn a22(&self) -> f64 {
        self.a22
    }
}

/// The reduced parameter pair driving every decision in the dynamics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameParams {
    a1: f64,
    a2: f64,
}

/// Sign class of one reduced parameter: positive favours clustering with
/// one's own strategy, negative favours the opposite, zero is indifferent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyClass {
    Selfish,
    Altruistic,
    Neutral,
}

impl StrategyClass {
    fn of(a: f64) -> Self {
        if a > 0.0 {
            StrategyClass::Selfish
        } else if a < 0.0 {
            StrategyClass::Altruistic
        } else {
            StrategyClass::Neutral
        }
    }
}

impl GameParams {
    pub fn new(a1: f64, a2: f64) -> Result<Self> {
        for v in [a1, a2] {
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "game parameters must be finite, got {v}"
                )));
            }
        }
        Ok(Self { a1, a2 })
    }

    /// Reduce a full payoff matrix to the difference pair that the dynamics
    /// actually depend on.
    pub fn from_matrix(matrix: &PayoffMatrix) -> Self {
        Self {
            a1: matrix.a11 - matrix.a21,
            a2: matrix.a22 - matrix.a12,
        }
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn a2(&self) -> f64 {
        self.a2
    }

    /// Sign class of each strategy's reduced parameter.
    pub fn classification(&self) -> (StrategyClass, StrategyClass) {
        (StrategyClass::of(self.a1), StrategyClass::of(self.a2))
    }
}

/// Both payoff levels `(phi1, phi2)` a site would earn from its current
/// neighbourhood, from the full matrix.
pub fn payoff_levels(field: &StrategyField, matrix: &PayoffMatrix, site: &SiteId) -> (f64, f64) {
    let (n1, n2) = field.neighbor_counts(site);
    let (n1, n2) = (n1 as f64, n2 as f64);
    (
        matrix.a11 * n1 + matrix.a12 * n2,
        matrix.a21 * n1 + matrix.a22 * n2,
    )
}

/// The reduced payoff gap `a1*N1 - a2*N2`; its sign decides the update.
pub fn payoff_gap(field: &StrategyField, params: &GameParams, site: &SiteId) -> f64 {
    let (n1, n2) = field.neighbor_counts(site);
    params.a1 * n1 as f64 - params.a2 * n2 as f64
}

/// What an update at linear index `index` would do right now: `Some(new)` if
/// the site would switch, `None` if it already plays a best response (ties
/// included).
#[inline]
pub fn flip_target_at(
    field: &StrategyField,
    params: &GameParams,
    index: usize,
) -> Option<Strategy> {
    let (n1, n2) = field.neighbor_counts_at(index);
    let lhs = params.a1 * n1 as f64;
    let rhs = params.a2 * n2 as f64;
    if lhs > rhs {
        (!field.is_one_at(index)).then_some(Strategy::One)
    } else if lhs < rhs {
        field.is_one_at(index).then_some(Strategy::Two)
    } else {
        None
    }
}

/// Coordinate-addressed variant of [`flip_target_at`].
pub fn flip_target(field: &StrategyField, params: &GameParams, site: &SiteId) -> Option<Strategy> {
    flip_target_at(field, params, field.geometry().linear_index(site))
}

/// Whether no site anywhere wants to switch: the configuration is a fixed
/// point of the dynamics.
pub fn is_absorbing(field: &StrategyField, params: &GameParams) -> bool {
    (0..field.geometry().site_count()).all(|i| flip_target_at(field, params, i).is_none())
}
