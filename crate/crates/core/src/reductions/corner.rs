//! Corner-fill certificates for the synchronous response map.
//!
//! Seed one fully-1 aligned block on each of the `d` faces below a target
//! block, then iterate the response map. The target block fills layer by
//! layer: after `n` steps every corner whose offset has coordinate sum
//! below `n` plays 1, so the whole block is filled after `d+1` steps. The
//! certificate materialises that schedule on a side-8 torus and reports
//! which required sites, if any, were missing at each step.

use super::response::response_map;
use crate::error::Error;
use crate::lattice::{GameParams, LatticeGeometry, SiteId, StrategyField};
use crate::Result;

/// One step of the schedule: after `iterate` applications of the response
/// map, every site in `required` must play 1; `missing` lists those that
/// did not.
#[derive(Clone, Debug)]
pub struct CornerStage {
    pub iterate: usize,
    pub required: Vec<SiteId>,
    pub missing: Vec<SiteId>,
}

/// Outcome of [`corner_fill_certificate`].
#[derive(Clone, Debug)]
pub struct CornerFillReport {
    pub dimension: usize,
    pub passed: bool,
    pub stages: Vec<CornerStage>,
}

/// All sites of the aligned block whose origin corner is `corner`.
fn block_sites(g: &LatticeGeometry, corner: &[i64]) -> Vec<SiteId> {
    let d = g.dimension();
    (0u32..(1u32 << d))
        .map(|mask| {
            let coords: Vec<i64> = corner
                .iter()
                .enumerate()
                .map(|(axis, &c)| c + i64::from(mask >> axis & 1))
                .collect();
            g.site(&coords)
        })
        .collect()
}

/// Run the layer-by-layer fill check in `dimension` dimensions (1 to 3)
/// for parameters with `a1 > a2 > 0` — the regime where a site joining
/// strategy 1 needs only half of its neighbourhood already converted.
pub fn corner_fill_certificate(dimension: usize, params: &GameParams) -> Result<CornerFillReport> {
    if !(1..=3).contains(&dimension) {
        return Err(Error::InvalidInput(format!(
            "corner certificates cover dimensions 1 to 3, got {dimension}"
        )));
    }
    if !(params.a1() > params.a2() && params.a2() > 0.0) {
        return Err(Error::InvalidInput(format!(
            "corner certificates need a1 > a2 > 0, got a1={}, a2={}",
            params.a1(),
            params.a2()
        )));
    }

    let g = LatticeGeometry::new(&vec![8; dimension])?;
    // Target block at coarse coordinates (2,...,2); seed blocks sit one
    // coarse step below it along each axis.
    let target_corner: Vec<i64> = vec![4; dimension];
    let mut seeds: Vec<SiteId> = Vec::new();
    for axis in 0..dimension {
        let mut corner = target_corner.clone();
        corner[axis] -= 2;
        seeds.extend(block_sites(&g, &corner));
    }
    let mut current = StrategyField::from_one_sites(&g, &seeds);

    let mut stages = Vec::new();
    let mut passed = true;
    for n in 1..=dimension + 1 {
        current = response_map(&current, params);
        let required: Vec<SiteId> = (0u32..(1u32 << dimension))
            .filter(|mask| (mask.count_ones() as usize) < n)
            .map(|mask| {
                let coords: Vec<i64> = target_corner
                    .iter()
                    .enumerate()
                    .map(|(axis, &c)| c + i64::from(mask >> axis & 1))
                    .collect();
                g.site(&coords)
            })
            .collect();
        let missing: Vec<SiteId> = required
            .iter()
            .filter(|site| !current.is_one_at(g.linear_index(site)))
            .cloned()
            .collect();
        passed &= missing.is_empty();
        stages.push(CornerStage {
            iterate: n,
            required,
            missing,
        });
    }

    Ok(CornerFillReport {
        dimension,
        passed,
        stages,
    })
}
