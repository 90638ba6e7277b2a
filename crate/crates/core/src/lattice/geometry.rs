//! Periodic rectangular lattices of arbitrary dimension.
//!
//! Sites are addressed two ways: as [`SiteId`] coordinate vectors for the
//! public API, and as row-major linear indices (last axis fastest) for the
//! inner loops. Every side must be even — the block reduction tiles the torus
//! with aligned 2-blocks and odd sides would break the tiling — and at least
//! four, so the two neighbours along an axis are always distinct sites.

use crate::error::Error;
use crate::Result;

/// Shape of a periodic lattice: dimension, side lengths, and the row-major
/// strides derived from them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeGeometry {
    sides: Vec<usize>,
    strides: Vec<usize>,
    site_count: usize,
}

/// A single lattice site, held in canonical form: every coordinate already
/// wrapped into `[0, side)`. Construct through [`LatticeGeometry::site`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SiteId {
    coords: Vec<i64>,
}

impl SiteId {
    pub fn coords(&self) -> &[i64] {
        &self.coords
    }
}

impl LatticeGeometry {
    /// Smallest admissible side length.
    pub const MIN_SIDE: usize = 4;

    pub fn new(sides: &[usize]) -> Result<Self> {
        if sides.is_empty() {
            return Err(Error::InvalidGeometry("dimension must be at least 1".into()));
        }
        for &side in sides {
            if side < Self::MIN_SIDE {
                return Err(Error::InvalidGeometry(format!(
                    "side {side} is below the minimum of {}",
                    Self::MIN_SIDE
                )));
            }
            if side % 2 != 0 {
                return Err(Error::InvalidGeometry(format!("side {side} is odd")));
            }
        }
        let mut site_count = 1usize;
        for &side in sides {
            site_count = site_count
                .checked_mul(side)
                .ok_or_else(|| Error::InvalidGeometry("site count overflows usize".into()))?;
        }
        // Row-major: the last axis varies fastest.
        let mut strides = vec![1usize; sides.len()];
        for axis in (0..sides.len().saturating_sub(1)).rev() {
            strides[axis] = strides[axis + 1] * sides[axis + 1];
        }
        Ok(Self {
            sides: sides.to_vec(),
            strides,
            site_count,
        })
    }

    pub fn dimension(&self) -> usize {
        self.sides.len()
    }

    pub fn sides(&self) -> &[usize] {
        &self.sides
    }

    pub(crate) fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn site_count(&self) -> usize {
        self.site_count
    }

    /// Number of lattice neighbours of any site (twice the dimension).
    pub fn neighbor_count(&self) -> usize {
        2 * self.dimension()
    }

    /// Canonicalise raw coordinates into a site, wrapping each one
    /// periodically. Panics if the coordinate count differs from the
    /// dimension — that is a programming error, not a data error.
    pub fn site(&self, coords: &[i64]) -> SiteId {
        assert_eq!(
            coords.len(),
            self.dimension(),
            "coordinate count must equal the lattice dimension"
        );
        let wrapped = coords
            .iter()
            .zip(&self.sides)
            .map(|(&c, &side)| c.rem_euclid(side as i64))
            .collect();
        SiteId { coords: wrapped }
    }

    pub fn linear_index(&self, site: &SiteId) -> usize {
        debug_assert_eq!(site.coords.len(), self.dimension());
        site.coords
            .iter()
            .zip(&self.strides)
            .map(|(&c, &s)| c as usize * s)
            .sum()
    }

    pub fn site_at(&self, index: usize) -> SiteId {
        debug_assert!(index < self.site_count);
        let coords = self
            .strides
            .iter()
            .zip(&self.sides)
            .map(|(&stride, &side)| (index / stride % side) as i64)
            .collect();
        SiteId { coords }
    }

    /// The `2d` nearest neighbours of a site, in axis order with the
    /// downward neighbour first.
    pub fn neighbors(&self, site: &SiteId) -> Vec<SiteId> {
        let mut out = Vec::with_capacity(self.neighbor_count());
        for axis in 0..self.dimension() {
            for delta in [-1i64, 1] {
                let mut coords = site.coords.clone();
                coords[axis] += delta;
                out.push(self.site(&coords));
            }
        }
        out
    }

    /// Linear index of the neighbour one step along `axis`, wrapping.
    #[inline]
    pub(crate) fn step(&self, index: usize, axis: usize, up: bool) -> usize {
        let stride = self.strides[axis];
        let side = self.sides[axis];
        let coord = index / stride % side;
        if up {
            if coord + 1 == side {
                index - (side - 1) * stride
            } else {
                index + stride
            }
        } else if coord == 0 {
            index + (side - 1) * stride
        } else {
            index - stride
        }
    }

    /// Visit the linear indices of all `2d` neighbours of `index`.
    #[inline]
    pub fn for_each_neighbor(&self, index: usize, mut visit: impl FnMut(usize)) {
        for axis in 0..self.dimension() {
            visit(self.step(index, axis, false));
            visit(self.step(index, axis, true));
        }
    }
}
