//! Synchronous response map: every site revises at once against the
//! frozen current configuration, keeping its strategy on an exact tie.
//!
//! For positive `a1` and `a2` the map is monotone: a larger strategy-1
//! set has larger neighbour counts `N1` (and smaller `N2`) everywhere, so
//! each site's comparison can only tip towards 1. When the input also
//! satisfies `input ⊆ map(input)` — unions of fully-1 aligned blocks do —
//! the iterates grow to a fixed point, the deterministic closure, and
//! [`response_closure`] computes it.

use crate::error::Error;
use crate::lattice::{GameParams, Strategy, StrategyField};
use crate::Result;

/// Apply the synchronous best-response revision once. A site ends up with
/// strategy 1 exactly when `a1*N1 > a2*N2`, or it already plays 1 and the
/// comparison ties.
pub fn response_map(field: &StrategyField, params: &GameParams) -> StrategyField {
    let n = field.geometry().site_count();
    let mut out = field.clone();
    for index in 0..n {
        let (n1, n2) = field.neighbor_counts_at(index);
        let gap = params.a1() * n1 as f64 - params.a2() * n2 as f64;
        let one = gap > 0.0 || (gap == 0.0 && field.is_one_at(index));
        out.set_at(index, if one { Strategy::One } else { Strategy::Two });
    }
    out
}

/// `steps` applications of [`response_map`].
pub fn response_iterate(field: &StrategyField, params: &GameParams, steps: usize) -> StrategyField {
    let mut current = field.clone();
    for _ in 0..steps {
        current = response_map(&current, params);
    }
    current
}

/// Iterate [`response_map`] to its fixed point, checking at every step
/// that the strategy-1 set grew. Errors if an iterate shrinks (the input
/// was not expanding, so no closure exists for it) or if no fixed point
/// appears within `site_count` iterations (impossible for a genuinely
/// growing sequence, which adds at least one site per step).
pub fn response_closure(field: &StrategyField, params: &GameParams) -> Result<StrategyField> {
    response_closure_with_depth(field, params).map(|(fixed, _)| fixed)
}

/// [`response_closure`], also reporting how many productive iterations
/// were needed to reach the fixed point.
pub fn response_closure_with_depth(
    field: &StrategyField,
    params: &GameParams,
) -> Result<(StrategyField, usize)> {
    let limit = field.geometry().site_count();
    let mut current = field.clone();
    let mut depth = 0usize;
    loop {
        let next = response_map(&current, params);
        if next == current {
            return Ok((current, depth));
        }
        if !current.is_subset_of(&next) {
            return Err(Error::ContractViolation(
                "response map shrank the strategy-1 set; the closure is defined only for \
                 expanding initial data such as unions of fully-1 aligned blocks"
                    .into(),
            ));
        }
        depth += 1;
        if depth > limit {
            return Err(Error::ContractViolation(
                "response iteration failed to stabilise within site-count steps".into(),
            ));
        }
        current = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeGeometry;
    use proptest::prelude::*;
    use crate::lattice::Strategy;

    fn torus(sides: &[usize]) -> LatticeGeometry {
        LatticeGeometry::new(sides).unwrap()
    }

    fn block(g: &LatticeGeometry, corner: [i64; 2]) -> Vec<crate::lattice::SiteId> {
        let mut sites = Vec::new();
        for dx in 0..2 {
            for dy in 0..2 {
                sites.push(g.site(&[corner[0] + dx, corner[1] + dy]));
            }
        }
        sites
    }

    #[test]
    fn single_block_is_a_fixed_point_under_weakly_selfish_params() {
        let g = torus(&[8, 8]);
        let field = StrategyField::from_one_sites(&g, &block(&g, [2, 2]));
        let params = GameParams::new(1.01, 1.0).unwrap();
        assert_eq!(response_map(&field, &params), field);
        let (closure, depth) = response_closure_with_depth(&field, &params).unwrap();
        assert_eq!(closure, field);
        assert_eq!(depth, 0);
    }

    #[test]
    fn strong_advantage_grows_a_block_to_consensus() {
        let g = torus(&[6, 6]);
        let field = StrategyField::from_one_sites(&g, &block(&g, [0, 0]));
        // In two dimensions a single strategy-1 neighbour wins once
        // a1 > 3*a2, so the block expands every step.
        let params = GameParams::new(3.25, 1.0).unwrap();
        let (closure, depth) = response_closure_with_depth(&field, &params).unwrap();
        assert!(closure.is_uniform(Strategy::One));
        assert!(depth >= 1 && depth <= g.site_count());
    }

    #[test]
    fn iterate_matches_repeated_map_application() {
        let g = torus(&[6, 6]);
        let field = StrategyField::random(&g, 0.5, 3).unwrap();
        let params = GameParams::new(1.5, 1.0).unwrap();
        assert_eq!(response_iterate(&field, &params, 0), field);
        let once = response_map(&field, &params);
        assert_eq!(response_iterate(&field, &params, 1), once);
        assert_eq!(
            response_iterate(&field, &params, 3),
            response_map(&response_map(&once, &params), &params)
        );
    }

    #[test]
    fn ties_keep_the_current_strategy() {
        // Alternating stripes under a1 == a2: every site sees N1 == N2,
        // so the map is the identity.
        let g = torus(&[4, 4]);
        let mut field = StrategyField::uniform(&g, Strategy::Two);
        for x in 0..4i64 {
            for y in 0..4i64 {
                if y % 2 == 0 {
                    field.set(&g.site(&[x, y]), Strategy::One);
                }
            }
        }
        let params = GameParams::new(1.0, 1.0).unwrap();
        assert_eq!(response_map(&field, &params), field);
    }

    #[test]
    fn closure_rejects_shrinking_input() {
        let g = torus(&[8, 8]);
        let field = StrategyField::from_one_sites(&g, &block(&g, [2, 2]));
        // With a2 twice a1, the block's corners lose their comparison
        // (N1 == N2 == 2) and the block dissolves.
        let params = GameParams::new(1.0, 2.0).unwrap();
        assert!(matches!(
            response_closure(&field, &params),
            Err(Error::ContractViolation(_))
        ));
        // A lone dissenting site shrinks as well.
        let lone = StrategyField::from_one_sites(&g, [&g.site(&[4, 4])]);
        assert!(matches!(
            response_closure(&lone, &GameParams::new(1.01, 1.0).unwrap()),
            Err(Error::ContractViolation(_))
        ));
    }

    proptest! {
        // Monotonicity: nested inputs give nested outputs, for any
        // positive parameter pair (quarter-integers keep ties exact).
        #[test]
        fn response_map_is_monotone_for_positive_params(
            seed in 0u64..1000,
            p in 0.2f64..0.8,
            keep_mod in 2usize..5,
            a1q in 1u32..16,
            a2q in 1u32..16,
        ) {
            let g = torus(&[6, 6]);
            let larger = StrategyField::random(&g, p, seed).unwrap();
            let mut smaller = larger.clone();
            for index in larger.one_indices().collect::<Vec<_>>() {
                if index % keep_mod == 0 {
                    smaller.set_at(index, Strategy::Two);
                }
            }
            prop_assert!(smaller.is_subset_of(&larger));
            let params = GameParams::new(a1q as f64 / 4.0, a2q as f64 / 4.0).unwrap();
            let mapped_small = response_map(&smaller, &params);
            let mapped_large = response_map(&larger, &params);
            prop_assert!(mapped_small.is_subset_of(&mapped_large));
        }

        // Expansion persists: once an iterate contains its predecessor,
        // the next iterate contains it in turn.
        #[test]
        fn expansion_propagates_one_step(
            seed in 0u64..500,
            a1q in 1u32..16,
            a2q in 1u32..16,
        ) {
            let g = torus(&[6, 6]);
            let field = StrategyField::random(&g, 0.5, seed).unwrap();
            let params = GameParams::new(a1q as f64 / 4.0, a2q as f64 / 4.0).unwrap();
            let once = response_map(&field, &params);
            if field.is_subset_of(&once) {
                let twice = response_map(&once, &params);
                prop_assert!(once.is_subset_of(&twice));
            }
        }
    }
}
