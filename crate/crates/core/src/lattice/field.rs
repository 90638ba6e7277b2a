//! Strategy configurations: which of the two strategies each site plays.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::bits::Bits;
use super::geometry::{LatticeGeometry, SiteId};
use crate::error::Error;
use crate::Result;

/// One of the two pure strategies a site can play.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    One,
    Two,
}

impl Strategy {
    pub fn other(self) -> Self {
        match self {
            Strategy::One => Strategy::Two,
            Strategy::Two => Strategy::One,
        }
    }
}

/// A full strategy assignment on a torus, packed one bit per site
/// (bit raised = strategy 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyField {
    geometry: LatticeGeometry,
    ones: Bits,
}

impl StrategyField {
    /// Every site playing the same strategy.
    pub fn uniform(geometry: &LatticeGeometry, strategy: Strategy) -> Self {
        let ones = match strategy {
            Strategy::One => Bits::filled(geometry.site_count()),
            Strategy::Two => Bits::new(geometry.site_count()),
        };
        Self {
            geometry: geometry.clone(),
            ones,
        }
    }

    /// Independent draws: each site plays strategy 1 with probability `p`.
    /// Identical `(geometry, p, seed)` always produce the identical field.
    pub fn random(geometry: &LatticeGeometry, p: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ones = Bits::new(geometry.site_count());
        for i in 0..geometry.site_count() {
            if rng.random::<f64>() < p {
                ones.set(i, true);
            }
        }
        Ok(Self {
            geometry: geometry.clone(),
            ones,
        })
    }

    /// Strategy 1 exactly on the listed sites.
    pub fn from_one_sites<'a>(
        geometry: &LatticeGeometry,
        sites: impl IntoIterator<Item = &'a SiteId>,
    ) -> Self {
        let mut field = Self::uniform(geometry, Strategy::Two);
        for site in sites {
            field.set(site, Strategy::One);
        }
        field
    }

    pub(crate) fn ones_bits(&self) -> &Bits {
        &self.ones
    }

    pub fn geometry(&self) -> &LatticeGeometry {
        &self.geometry
    }

    pub fn get(&self, site: &SiteId) -> Strategy {
        self.strategy_at(self.geometry.linear_index(site))
    }

    #[inline]
    pub fn strategy_at(&self, index: usize) -> Strategy {
        if self.ones.get(index) {
            Strategy::One
        } else {
            Strategy::Two
        }
    }

    #[inline]
    pub fn is_one_at(&self, index: usize) -> bool {
        self.ones.get(index)
    }

    pub fn set(&mut self, site: &SiteId, strategy: Strategy) {
        self.set_at(self.geometry.linear_index(site), strategy);
    }

    #[inline]
    pub fn set_at(&mut self, index: usize, strategy: Strategy) {
        self.ones.set(index, strategy == Strategy::One);
    }

    /// Number of sites playing strategy 1.
    pub fn count_one(&self) -> usize {
        self.ones.count_ones()
    }

    /// Fraction of sites playing strategy 1.
    pub fn density_one(&self) -> f64 {
        self.count_one() as f64 / self.geometry.site_count() as f64
    }

    pub fn is_uniform(&self, strategy: Strategy) -> bool {
        match strategy {
            Strategy::One => self.count_one() == self.geometry.site_count(),
            Strategy::Two => self.count_one() == 0,
        }
    }

    /// Whether this field's strategy-1 set is contained in `other`'s.
    /// Panics if the two fields live on different geometries.
    pub fn is_subset_of(&self, other: &StrategyField) -> bool {
        assert_eq!(
            self.geometry, other.geometry,
            "subset comparison requires a shared geometry"
        );
        self.ones.is_subset_of(&other.ones)
    }

    /// Linear indices of strategy-1 sites, increasing.
    pub fn one_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.ones.ones()
    }

    /// Strategy-1 sites as coordinates.
    pub fn one_sites(&self) -> impl Iterator<Item = SiteId> + '_ {
        self.ones.ones().map(|i| self.geometry.site_at(i))
    }

    /// Count of strategy-1 and strategy-2 neighbours of a site; the two
    /// always sum to `2d`.
    #[inline]
    pub fn neighbor_counts_at(&self, index: usize) -> (u32, u32) {
        let mut n1 = 0u32;
        for axis in 0..self.geometry.dimension() {
            n1 += self.ones.get(self.geometry.step(index, axis, false)) as u32;
            n1 += self.ones.get(self.geometry.step(index, axis, true)) as u32;
        }
        (n1, self.geometry.neighbor_count() as u32 - n1)
    }

    /// Coordinate-addressed variant of [`Self::neighbor_counts_at`].
    pub fn neighbor_counts(&self, site: &SiteId) -> (u32, u32) {
        self.neighbor_counts_at(self.geometry.linear_index(site))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus(sides: &[usize]) -> LatticeGeometry {
        LatticeGeometry::new(sides).unwrap()
    }

    #[test]
    fn uniform_fields_have_extreme_densities() {
        let g = torus(&[4, 4]);
        assert_eq!(StrategyField::uniform(&g, Strategy::One).density_one(), 1.0);
        assert_eq!(StrategyField::uniform(&g, Strategy::Two).density_one(), 0.0);
    }

    #[test]
    fn random_density_zero_and_one_are_exact() {
        let g = torus(&[6, 6]);
        assert!(StrategyField::random(&g, 0.0, 7).unwrap().is_uniform(Strategy::Two));
        assert!(StrategyField::random(&g, 1.0, 7).unwrap().is_uniform(Strategy::One));
    }

    #[test]
    fn random_rejects_bad_probability() {
        let g = torus(&[4]);
        assert!(matches!(
            StrategyField::random(&g, 1.5, 0),
            Err(Error::InvalidProbability(_))
        ));
        assert!(matches!(
            StrategyField::random(&g, -0.1, 0),
            Err(Error::InvalidProbability(_))
        ));
        assert!(StrategyField::random(&g, f64::NAN, 0).is_err());
    }

    #[test]
    fn random_is_reproducible_and_seed_sensitive() {
        let g = torus(&[8, 8]);
        let a = StrategyField::random(&g, 0.5, 42).unwrap();
        let b = StrategyField::random(&g, 0.5, 42).unwrap();
        let c = StrategyField::random(&g, 0.5, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn random_half_density_is_statistically_plausible() {
        // 100 seeds on a 64x64 torus: the mean density of 409 600 fair draws
        // concentrates far inside [0.48, 0.52].
        let g = torus(&[64, 64]);
        let mut total = 0usize;
        for seed in 0..100 {
            total += StrategyField::random(&g, 0.5, seed).unwrap().count_one();
        }
        let mean = total as f64 / (100.0 * g.site_count() as f64);
        assert!((0.48..=0.52).contains(&mean), "mean density {mean}");
    }

    #[test]
    fn neighbor_counts_partition_2d() {
        let g = torus(&[4, 6]);
        let field = StrategyField::random(&g, 0.3, 5).unwrap();
        for idx in 0..g.site_count() {
            let (n1, n2) = field.neighbor_counts_at(idx);
            assert_eq!(n1 + n2, 4);
        }
    }

    #[test]
    fn neighbor_counts_around_a_lone_site() {
        let g = torus(&[8, 8]);
        let field = StrategyField::from_one_sites(&g, [&g.site(&[0, 0])]);
        assert_eq!(field.neighbor_counts(&g.site(&[1, 0])), (1, 3));
        assert_eq!(field.neighbor_counts(&g.site(&[0, 0])), (0, 4));
        assert_eq!(field.neighbor_counts(&g.site(&[2, 0])), (0, 4));
        // Periodic wrap: the lone site is also a neighbour of (7, 0).
        assert_eq!(field.neighbor_counts(&g.site(&[7, 0])), (1, 3));
    }

    #[test]
    fn subset_follows_strategy_one_sets() {
        let g = torus(&[4, 4]);
        let small = StrategyField::from_one_sites(&g, [&g.site(&[0, 0])]);
        let big = StrategyField::from_one_sites(&g, [&g.site(&[0, 0]), &g.site(&[1, 1])]);
        assert!(small.is_subset_of(&big));
        assert!(!big.is_subset_of(&small));
        assert!(small.is_subset_of(&small));
    }
}
