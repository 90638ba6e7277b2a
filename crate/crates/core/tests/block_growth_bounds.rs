//! How threshold-2 growth on the block lattice relates to the response
//! closure of block unions, pinned on the two smallest neighbour
//! geometries.
//!
//! Growth through a corner (occupied neighbours on two distinct axes) is
//! matched exactly by the closure. Growth through an opposite pair
//! (both occupied neighbours on one axis) is not: each site of the
//! middle block sees a single strategy-1 neighbour, which loses the
//! payoff comparison whenever `a1 < 3*a2`, so the closure freezes while
//! the threshold rule advances. The block-level growth bound is
//! therefore a per-run check, not an identity — block unions whose
//! occupied cells line up on one axis genuinely break it.

use latgame_core::bootstrap::bootstrap_limit;
use latgame_core::lattice::{GameParams, LatticeGeometry, SiteId, StrategyField};
use latgame_core::reductions::{hypercubic_view, response_closure, CoarseField};

/// Field whose strategy-1 set is exactly the union of the given aligned
/// 2x2 blocks (block coordinates live on the half-scale lattice).
fn block_union(geometry: &LatticeGeometry, blocks: &[[i64; 2]]) -> StrategyField {
    let mut sites: Vec<SiteId> = Vec::new();
    for &[r, c] in blocks {
        for dr in 0..2 {
            for dc in 0..2 {
                sites.push(geometry.site(&[2 * r + dr, 2 * c + dc]));
            }
        }
    }
    StrategyField::from_one_sites(geometry, &sites)
}

fn occupied(view: &CoarseField) -> Vec<usize> {
    view.occupied_indices().collect()
}

#[test]
fn corner_adjacent_blocks_fill_exactly_like_threshold_growth() {
    let g = LatticeGeometry::new(&[8, 8]).unwrap();
    let params = GameParams::new(1.01, 1.0).unwrap();
    // Blocks diagonal from one another: their shared corners have
    // occupied neighbours on two distinct axes.
    let initial = block_union(&g, &[[0, 1], [1, 0]]);
    let closure = response_closure(&initial, &params).unwrap();

    let grown = bootstrap_limit(&hypercubic_view(&initial), 2);
    let closure_view = hypercubic_view(&closure);
    // Both processes complete the 2x2 square of blocks and stop.
    assert_eq!(occupied(&grown), vec![0, 1, 4, 5]);
    assert_eq!(occupied(&closure_view), occupied(&grown));
    assert!(grown.is_subset_of(&closure_view));
}

#[test]
fn opposite_blocks_advance_the_threshold_rule_but_freeze_the_closure() {
    let g = LatticeGeometry::new(&[8, 8]).unwrap();
    let params = GameParams::new(1.01, 1.0).unwrap();
    // Two blocks on one row of the 4x4 block torus, two cells apart:
    // the cells between them (on both sides, thanks to wrap-around)
    // have two occupied neighbours — but on a single axis.
    let initial = block_union(&g, &[[0, 1], [0, 3]]);
    let closure = response_closure(&initial, &params).unwrap();

    // Every site outside the two blocks sees at most one strategy-1
    // neighbour, and 1.01*1 < 1*3, so nothing moves.
    assert_eq!(closure, initial);

    // The threshold rule fills the flanked cells, then the whole row.
    let grown = bootstrap_limit(&hypercubic_view(&initial), 2);
    assert_eq!(occupied(&grown), vec![0, 1, 2, 3]);
    assert!(!grown.is_subset_of(&hypercubic_view(&closure)));
}

#[test]
fn a_strong_payoff_advantage_restores_the_growth_bound_here() {
    let g = LatticeGeometry::new(&[8, 8]).unwrap();
    // With a1 > 3*a2 a single strategy-1 neighbour already wins, so the
    // same opposite pair now spreads through the whole torus and the
    // threshold limit is (strictly) contained again.
    let params = GameParams::new(3.25, 1.0).unwrap();
    let initial = block_union(&g, &[[0, 1], [0, 3]]);
    let closure = response_closure(&initial, &params).unwrap();
    assert_eq!(closure.count_one(), g.site_count());

    let grown = bootstrap_limit(&hypercubic_view(&initial), 2);
    assert!(grown.is_subset_of(&hypercubic_view(&closure)));
    assert_eq!(occupied(&grown), vec![0, 1, 2, 3]);
}
