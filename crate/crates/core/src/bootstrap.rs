//! Neighbourhood-threshold growth on the coarse lattice.
//!
//! Occupied cells stay occupied; an empty cell becomes occupied once at
//! least `m` of its `2d` neighbour slots hold occupied cells (on a side-2
//! axis both slots are the same cell, which then counts twice). The
//! synchronous iteration is monotone in the initial data, in `q` along a
//! thresholded-uniform sweep, and antitone in `m`.

use crate::dynamics::derive_seed;
use crate::error::Error;
use crate::reductions::{CoarseField, CoarseGeometry};
use crate::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One synchronous round: every empty cell with at least `m` occupied
/// neighbour slots becomes occupied.
pub fn bootstrap_step(field: &CoarseField, m: usize) -> CoarseField {
    let degree = field.geometry().neighbor_count();
    assert!(
        (1..=degree).contains(&m),
        "threshold m must lie in 1..={degree}"
    );
    let mut next = field.clone();
    for index in 0..field.geometry().site_count() {
        if !field.is_occupied_at(index) && field.occupied_neighbor_count_at(index) >= m {
            next.set_at(index, true);
        }
    }
    next
}

/// Iterate [`bootstrap_step`] to its fixed point. Each productive round
/// occupies at least one new cell, so the limit is reached within
/// `site_count` rounds.
pub fn bootstrap_limit(field: &CoarseField, m: usize) -> CoarseField {
    let mut current = field.clone();
    loop {
        let next = bootstrap_step(&current, m);
        if next == current {
            return current;
        }
        current = next;
    }
}

/// One point of a sweep: on the hypercubic coarse lattice of the given
/// side, the fraction of seeds whose Bernoulli(`q`) start grew to full
/// occupancy.
#[derive(Clone, Debug)]
pub struct SweepCell {
    pub side: usize,
    pub q: f64,
    pub fraction_full: f64,
    pub seeds: u64,
}

/// Result of [`sweep_critical_density`], cells ordered by side, then `q`.
#[derive(Clone, Debug)]
pub struct SweepResult {
    pub dimension: usize,
    pub m: usize,
    pub cells: Vec<SweepCell>,
}

impl SweepResult {
    /// The recorded fraction for one `(side, q)` cell, if present.
    pub fn fraction(&self, side: usize, q: f64) -> Option<f64> {
        self.cells
            .iter()
            .find(|c| c.side == side && c.q == q)
            .map(|c| c.fraction_full)
    }
}

/// Estimate how often Bernoulli(`q`) initial occupancy grows to cover the
/// whole side-`L` hypercubic coarse lattice, across `L` in `sides` and
/// `q` in `q_values`.
///
/// All `q` values for one `(side, seed)` pair threshold the same uniform
/// sample, so each seed's outcome — and therefore `fraction_full` — is
/// exactly nondecreasing in `q`.
pub fn sweep_critical_density(
    dimension: usize,
    sides: &[usize],
    q_values: &[f64],
    m: usize,
    seeds: u64,
    master_seed: u64,
) -> Result<SweepResult> {
    if dimension == 0 {
        return Err(Error::InvalidGeometry(
            "at least one dimension is required".into(),
        ));
    }
    if !(1..=2 * dimension).contains(&m) {
        return Err(Error::InvalidInput(format!(
            "threshold m={m} outside 1..={} for dimension {dimension}",
            2 * dimension
        )));
    }
    if seeds == 0 {
        return Err(Error::InvalidInput("at least one seed is required".into()));
    }
    for &q in q_values {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidProbability(q));
        }
    }

    let mut cells = Vec::with_capacity(sides.len() * q_values.len());
    for &side in sides {
        let geometry = CoarseGeometry::new(&vec![side; dimension])?;
        let mut full_counts = vec![0u64; q_values.len()];
        for seed_index in 0..seeds {
            let sample_seed = derive_seed(derive_seed(master_seed, side as u64), seed_index);
            let mut rng = ChaCha8Rng::seed_from_u64(sample_seed);
            let uniforms: Vec<f64> =
                (0..geometry.site_count()).map(|_| rng.random()).collect();
            for (qi, &q) in q_values.iter().enumerate() {
                let initial = CoarseField::from_uniforms(&geometry, &uniforms, q)?;
                if bootstrap_limit(&initial, m).is_full() {
                    full_counts[qi] += 1;
                }
            }
        }
        for (qi, &q) in q_values.iter().enumerate() {
            cells.push(SweepCell {
                side,
                q,
                fraction_full: full_counts[qi] as f64 / seeds as f64,
                seeds,
            });
        }
    }
    Ok(SweepResult {
        dimension,
        m,
        cells,
    })
}
