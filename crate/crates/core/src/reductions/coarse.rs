//! The coarse lattice of aligned `2^d` blocks, and the reductions onto it.

use crate::error::Error;
use crate::lattice::{Bits, LatticeGeometry, Strategy, StrategyField};
use crate::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Periodic lattice for block-level fields. Unlike the fine lattice, sides
/// here only need to be at least 2 and may be odd (halving an even fine
/// side can produce either parity).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoarseGeometry {
    sides: Vec<usize>,
    strides: Vec<usize>,
    site_count: usize,
}

impl CoarseGeometry {
    pub const MIN_SIDE: usize = 2;

    pub fn new(sides: &[usize]) -> Result<Self> {
        if sides.is_empty() {
            return Err(Error::InvalidGeometry(
                "at least one dimension is required".into(),
            ));
        }
        let mut site_count: usize = 1;
        for &side in sides {
            if side < Self::MIN_SIDE {
                return Err(Error::InvalidGeometry(format!(
                    "coarse side {side} is below the minimum of {}",
                    Self::MIN_SIDE
                )));
            }
            site_count = site_count.checked_mul(side).ok_or_else(|| {
                Error::InvalidGeometry("site count overflows usize".into())
            })?;
        }
        let mut strides = vec![0usize; sides.len()];
        let mut acc = 1usize;
        for axis in (0..sides.len()).rev() {
            strides[axis] = acc;
            acc *= sides[axis];
        }
        Ok(Self {
            sides: sides.to_vec(),
            strides,
            site_count,
        })
    }

    /// Halve every side of a fine lattice. Always valid: fine sides are
    /// even and at least 4.
    pub fn from_fine(fine: &LatticeGeometry) -> Self {
        let sides: Vec<usize> = fine.sides().iter().map(|s| s / 2).collect();
        Self::new(&sides).expect("halved fine sides are valid coarse sides")
    }

    pub fn dimension(&self) -> usize {
        self.sides.len()
    }

    pub fn sides(&self) -> &[usize] {
        &self.sides
    }

    pub fn site_count(&self) -> usize {
        self.site_count
    }

    /// Number of neighbour slots per site (`2d`). On a side-2 axis the two
    /// slots land on the same site, which then counts twice in
    /// neighbourhood tallies.
    pub fn neighbor_count(&self) -> usize {
        2 * self.dimension()
    }

    /// Linear index of the site with the given coordinates, wrapped
    /// periodically onto the lattice.
    pub fn index(&self, coords: &[i64]) -> usize {
        assert_eq!(
            coords.len(),
            self.dimension(),
            "coordinate arity must match the lattice dimension"
        );
        let mut index = 0usize;
        for (axis, &c) in coords.iter().enumerate() {
            let wrapped = c.rem_euclid(self.sides[axis] as i64) as usize;
            index += wrapped * self.strides[axis];
        }
        index
    }

    pub fn coords(&self, index: usize) -> Vec<i64> {
        assert!(index < self.site_count, "index out of range");
        let mut rest = index;
        let mut coords = Vec::with_capacity(self.dimension());
        for axis in 0..self.dimension() {
            coords.push((rest / self.strides[axis]) as i64);
            rest %= self.strides[axis];
        }
        coords
    }

    /// Linear index one step along `axis` (up or down), wrapping.
    #[inline]
    pub fn step(&self, index: usize, axis: usize, up: bool) -> usize {
        let side = self.sides[axis];
        let stride = self.strides[axis];
        let coord = (index / stride) % side;
        if up {
            if coord + 1 == side {
                index + stride - side * stride
            } else {
                index + stride
            }
        } else if coord == 0 {
            index + (side - 1) * stride
        } else {
            index - stride
        }
    }
}

/// Occupancy field on a coarse lattice: each cell is occupied or not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoarseField {
    geometry: CoarseGeometry,
    occupied: Bits,
}

impl CoarseField {
    pub fn empty(geometry: &CoarseGeometry) -> Self {
        Self {
            geometry: geometry.clone(),
            occupied: Bits::new(geometry.site_count()),
        }
    }

    pub fn full(geometry: &CoarseGeometry) -> Self {
        Self {
            geometry: geometry.clone(),
            occupied: Bits::filled(geometry.site_count()),
        }
    }

    /// Independent Bernoulli(`q`) occupancy, reproducible from `seed`.
    pub fn random(geometry: &CoarseGeometry, q: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidProbability(q));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut field = Self::empty(geometry);
        for index in 0..geometry.site_count() {
            if rng.random::<f64>() < q {
                field.occupied.set(index, true);
            }
        }
        Ok(field)
    }

    /// Threshold a shared uniform sample: cell `z` is occupied when
    /// `uniforms[z] < q`. With one fixed `uniforms` vector, the occupied
    /// set grows with `q`, which couples occupancy across a `q`-sweep.
    pub fn from_uniforms(geometry: &CoarseGeometry, uniforms: &[f64], q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidProbability(q));
        }
        if uniforms.len() != geometry.site_count() {
            return Err(Error::InvalidInput(format!(
                "{} uniforms supplied for {} cells",
                uniforms.len(),
                geometry.site_count()
            )));
        }
        let mut field = Self::empty(geometry);
        for (index, &u) in uniforms.iter().enumerate() {
            if u < q {
                field.occupied.set(index, true);
            }
        }
        Ok(field)
    }

    /// Field occupied exactly at the given coordinate tuples.
    pub fn from_occupied_coords(geometry: &CoarseGeometry, coords: &[&[i64]]) -> Self {
        let mut field = Self::empty(geometry);
        for c in coords {
            field.occupied.set(geometry.index(c), true);
        }
        field
    }

    pub fn geometry(&self) -> &CoarseGeometry {
        &self.geometry
    }

    #[inline]
    pub fn is_occupied_at(&self, index: usize) -> bool {
        self.occupied.get(index)
    }

    pub fn set_at(&mut self, index: usize, occupied: bool) {
        self.occupied.set(index, occupied);
    }

    pub fn occupied_count(&self) -> usize {
        self.occupied.count_ones()
    }

    pub fn occupied_fraction(&self) -> f64 {
        self.occupied_count() as f64 / self.geometry.site_count() as f64
    }

    pub fn is_empty(&self) -> bool {
        self.occupied_count() == 0
    }

    pub fn is_full(&self) -> bool {
        self.occupied_count() == self.geometry.site_count()
    }

    /// True when every occupied cell of `self` is occupied in `other`.
    ///
    /// Panics if the geometries differ.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        assert_eq!(
            self.geometry, other.geometry,
            "cannot compare fields on different lattices"
        );
        self.occupied.is_subset_of(&other.occupied)
    }

    pub fn occupied_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.occupied.ones()
    }

    /// Occupied tally over the `2d` neighbour slots of `index`. On a
    /// side-2 axis both slots are the same cell, so an occupied wrapped
    /// neighbour contributes 2.
    #[inline]
    pub fn occupied_neighbor_count_at(&self, index: usize) -> usize {
        let mut count = 0;
        for axis in 0..self.geometry.dimension() {
            count += usize::from(self.occupied.get(self.geometry.step(index, axis, false)));
            count += usize::from(self.occupied.get(self.geometry.step(index, axis, true)));
        }
        count
    }
}

/// Fine linear index of the origin corner of block `z` (the site at twice
/// the block's coordinates).
fn block_base(fine: &LatticeGeometry, coarse: &CoarseGeometry, z: usize) -> usize {
    let coords = coarse.coords(z);
    let strides = fine.strides();
    coords
        .iter()
        .zip(strides)
        .map(|(&c, &stride)| 2 * c as usize * stride)
        .sum()
}

/// Whether the whole `2^d` block with origin corner `base` plays 1.
/// Offsets never wrap: block corners sit at coordinates `2z` and `2z+1`,
/// both inside the fine torus.
fn block_is_all_one(field: &StrategyField, base: usize) -> bool {
    let strides = field.geometry().strides();
    let d = strides.len();
    for mask in 0u32..(1u32 << d) {
        let mut index = base;
        for (axis, &stride) in strides.iter().enumerate() {
            if mask >> axis & 1 == 1 {
                index += stride;
            }
        }
        if !field.is_one_at(index) {
            return false;
        }
    }
    true
}

/// Keep exactly the aligned blocks that play 1 throughout; every other
/// site becomes strategy 2. The result is a union of full blocks and is
/// contained in the input's strategy-1 set.
pub fn sparse_reduce(field: &StrategyField) -> StrategyField {
    let fine = field.geometry();
    let coarse = CoarseGeometry::from_fine(fine);
    let strides: Vec<usize> = fine.strides().to_vec();
    let d = fine.dimension();
    let mut out = StrategyField::uniform(fine, Strategy::Two);
    for z in 0..coarse.site_count() {
        let base = block_base(fine, &coarse, z);
        if block_is_all_one(field, base) {
            for mask in 0u32..(1u32 << d) {
                let mut index = base;
                for (axis, &stride) in strides.iter().enumerate() {
                    if mask >> axis & 1 == 1 {
                        index += stride;
                    }
                }
                out.set_at(index, Strategy::One);
            }
        }
    }
    out
}

/// One coarse cell per aligned block, occupied exactly when the block
/// plays 1 throughout. Same information as [`sparse_reduce`], block-level.
pub fn hypercubic_view(field: &StrategyField) -> CoarseField {
    let fine = field.geometry();
    let coarse = CoarseGeometry::from_fine(fine);
    let mut out = CoarseField::empty(&coarse);
    for z in 0..coarse.site_count() {
        if block_is_all_one(field, block_base(fine, &coarse, z)) {
            out.set_at(z, true);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_rejects_degenerate_sides() {
        assert!(CoarseGeometry::new(&[]).is_err());
        assert!(CoarseGeometry::new(&[1, 4]).is_err());
        assert!(CoarseGeometry::new(&[0]).is_err());
        assert!(CoarseGeometry::new(&[3, 2]).is_ok(), "odd sides are fine here");
    }

    #[test]
    fn from_fine_halves_every_side() {
        let fine = LatticeGeometry::new(&[8, 6]).unwrap();
        let coarse = CoarseGeometry::from_fine(&fine);
        assert_eq!(coarse.sides(), &[4, 3]);
        assert_eq!(coarse.site_count(), 12);
    }

    #[test]
    fn index_and_coords_round_trip_with_wrapping() {
        let g = CoarseGeometry::new(&[3, 4]).unwrap();
        for index in 0..g.site_count() {
            assert_eq!(g.index(&g.coords(index)), index);
        }
        assert_eq!(g.index(&[-1, 5]), g.index(&[2, 1]));
    }

    #[test]
    fn step_wraps_and_matches_coordinate_arithmetic() {
        let g = CoarseGeometry::new(&[3, 5]).unwrap();
        for index in 0..g.site_count() {
            let c = g.coords(index);
            for axis in 0..2 {
                for (up, delta) in [(true, 1i64), (false, -1i64)] {
                    let mut moved = c.clone();
                    moved[axis] += delta;
                    assert_eq!(g.step(index, axis, up), g.index(&moved));
                }
            }
        }
    }

    #[test]
    fn side_two_axis_sees_the_same_neighbor_twice() {
        let g = CoarseGeometry::new(&[2, 4]).unwrap();
        let here = g.index(&[1, 1]);
        let other = g.index(&[0, 1]);
        assert_eq!(g.step(here, 0, true), other);
        assert_eq!(g.step(here, 0, false), other);
        let mut field = CoarseField::empty(&g);
        field.set_at(other, true);
        // The single wrapped neighbour fills both axis-0 slots.
        assert_eq!(field.occupied_neighbor_count_at(here), 2);
    }

    #[test]
    fn random_occupancy_respects_bounds_and_seeds() {
        let g = CoarseGeometry::new(&[8, 8]).unwrap();
        assert!(CoarseField::random(&g, -0.1, 0).is_err());
        assert!(CoarseField::random(&g, 1.1, 0).is_err());
        assert!(CoarseField::random(&g, f64::NAN, 0).is_err());
        assert_eq!(CoarseField::random(&g, 0.0, 0).unwrap().occupied_count(), 0);
        assert!(CoarseField::random(&g, 1.0, 0).unwrap().is_full());
        let a = CoarseField::random(&g, 0.4, 7).unwrap();
        assert_eq!(a, CoarseField::random(&g, 0.4, 7).unwrap());
        assert_ne!(a, CoarseField::random(&g, 0.4, 8).unwrap());
    }

    #[test]
    fn thresholded_uniforms_grow_with_q() {
        let g = CoarseGeometry::new(&[6, 6]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        let uniforms: Vec<f64> = (0..g.site_count()).map(|_| rng.random()).collect();
        let mut previous = CoarseField::from_uniforms(&g, &uniforms, 0.0).unwrap();
        for step in 1..=10 {
            let q = step as f64 / 10.0;
            let next = CoarseField::from_uniforms(&g, &uniforms, q).unwrap();
            assert!(previous.is_subset_of(&next), "occupancy must grow with q");
            previous = next;
        }
        assert!(previous.is_full());
        let wrong_len = vec![0.5; g.site_count() - 1];
        assert!(CoarseField::from_uniforms(&g, &wrong_len, 0.5).is_err());
    }

    #[test]
    fn reduction_keeps_exactly_the_full_blocks() {
        let fine = LatticeGeometry::new(&[4, 4]).unwrap();
        // Full block at coarse (0,0), plus stray 1s that complete no block.
        let ones = [
            fine.site(&[0, 0]),
            fine.site(&[0, 1]),
            fine.site(&[1, 0]),
            fine.site(&[1, 1]),
            fine.site(&[2, 2]),
            fine.site(&[3, 3]),
            fine.site(&[0, 2]),
        ];
        let field = StrategyField::from_one_sites(&fine, &ones);
        let reduced = sparse_reduce(&field);
        assert_eq!(reduced.count_one(), 4);
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            assert!(reduced.is_one_at(fine.linear_index(&fine.site(&[i, j]))));
        }
        assert!(reduced.is_subset_of(&field));

        let view = hypercubic_view(&field);
        assert_eq!(view.occupied_count(), 1);
        assert!(view.is_occupied_at(view.geometry().index(&[0, 0])));
        assert!(!view.is_occupied_at(view.geometry().index(&[1, 1])));
    }

    #[test]
    fn reduction_is_idempotent_and_consistent_with_the_view() {
        let fine = LatticeGeometry::new(&[8, 6]).unwrap();
        for seed in 0..20 {
            let field = StrategyField::random(&fine, 0.6, seed).unwrap();
            let reduced = sparse_reduce(&field);
            assert_eq!(sparse_reduce(&reduced), reduced);
            assert!(reduced.is_subset_of(&field));
            let view = hypercubic_view(&field);
            assert_eq!(hypercubic_view(&reduced), view);
            let d = fine.dimension();
            assert_eq!(view.occupied_count() << d, reduced.count_one());
        }
    }

    #[test]
    fn reduction_matches_a_direct_block_scan_in_three_dimensions() {
        let fine = LatticeGeometry::new(&[4, 4, 4]).unwrap();
        let field = StrategyField::random(&fine, 0.8, 99).unwrap();
        let view = hypercubic_view(&field);
        let coarse = view.geometry();
        for z in 0..coarse.site_count() {
            let zc = coarse.coords(z);
            let mut all_one = true;
            for dx in 0..2i64 {
                for dy in 0..2i64 {
                    for dz in 0..2i64 {
                        let site = fine.site(&[2 * zc[0] + dx, 2 * zc[1] + dy, 2 * zc[2] + dz]);
                        all_one &= field.is_one_at(fine.linear_index(&site));
                    }
                }
            }
            assert_eq!(view.is_occupied_at(z), all_one);
        }
    }

    #[test]
    fn block_occupancy_frequency_tracks_the_product_probability() {
        // Occupancy of a block under independent site play is
        // Bernoulli(p^4) in two dimensions; check the empirical mean.
        let fine = LatticeGeometry::new(&[16, 16]).unwrap();
        let p = 0.7f64;
        let mut total = 0usize;
        let mut cells = 0usize;
        for seed in 0..100 {
            let view = hypercubic_view(&StrategyField::random(&fine, p, seed).unwrap());
            total += view.occupied_count();
            cells += view.geometry().site_count();
        }
        let mean = total as f64 / cells as f64;
        let expected = p.powi(4);
        assert!(
            (mean - expected).abs() < 0.02,
            "mean {mean} too far from {expected}"
        );
    }
}
