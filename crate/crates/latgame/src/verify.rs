//! Built-in verification suite: structural guarantees of the dynamics
//! checked on live simulation runs rather than hand-picked examples.
//!
//! Five checks, labelled L1..L5 in reports:
//!
//! * L1 `coupled-inclusion` — two nested initial states driven by one
//!   event stream stay nested at every event (needs `a1, a2 > 0`).
//! * L2 `expanding-trajectory` — from a union of aligned blocks with
//!   `a1 > a2 > 0`, no site ever leaves strategy 1.
//! * L3 `closure-endpoint` — the response closure of any state sampled
//!   along such a trajectory equals the absorbed final state exactly.
//! * L4 `block-threshold-bound` — on the half-scale block lattice, the
//!   threshold-`d` growth limit of the initial blocks is contained in
//!   the blocks of the final state. Growth through occupied neighbours
//!   on distinct axes is matched by the dynamics; initial blocks that
//!   line up on a single axis genuinely break the bound (threshold
//!   growth advances where every affected site still sees only one
//!   strategy-1 neighbour), so violations here are a property of the
//!   sampled initial state, not noise.
//! * L5 `block-density` — the fraction of fully-occupied blocks in a
//!   product-`p` random field matches `p^(2^d)` within a normal-
//!   approximation band.

use latgame_core::bootstrap::bootstrap_limit;
use latgame_core::dynamics::{
    derive_seed, simulate_active_set_observed, simulate_coupled_observed, CoupledObserver,
    SimObserver,
};
use latgame_core::lattice::{GameParams, LatticeGeometry, Strategy, StrategyField};
use latgame_core::reductions::{hypercubic_view, response_closure, sparse_reduce};
use rayon::prelude::*;

use crate::error::Result;

/// Same band as the statistical tests elsewhere: two-sided normal
/// quantile for roughly one false alarm in a thousand runs.
pub const Z_BAND: f64 = 3.29;

#[derive(Debug, Clone)]
pub struct VerifySettings {
    pub sides: Vec<usize>,
    pub params: GameParams,
    pub p: f64,
    pub t_max: f64,
    pub seeds: u64,
    pub master_seed: u64,
    pub record_every: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped(String),
}

#[derive(Debug, Clone)]
pub struct VerifyItem {
    pub id: &'static str,
    pub label: &'static str,
    pub status: CheckStatus,
    /// Individual comparisons performed (events, states, cells...).
    pub checks: u64,
    pub violations: u64,
    pub detail: String,
}

impl VerifyItem {
    pub fn passed(&self) -> bool {
        !matches!(self.status, CheckStatus::Fail)
    }

    /// One human-readable report line.
    pub fn line(&self) -> String {
        let verdict = match &self.status {
            CheckStatus::Pass => "PASS".to_string(),
            CheckStatus::Fail => "FAIL".to_string(),
            CheckStatus::Skipped(reason) => format!("SKIP ({reason})"),
        };
        format!(
            "{} {}: {} [{} checks, {} violations] {}",
            self.id, self.label, verdict, self.checks, self.violations, self.detail
        )
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub items: Vec<VerifyItem>,
}

impl VerifyOutcome {
    pub fn failed(&self) -> bool {
        self.items.iter().any(|item| !item.passed())
    }
}

/// Per-seed tallies, merged across replicas in seed order.
#[derive(Debug, Default, Clone)]
struct SeedFindings {
    l1_checks: u64,
    l1_violations: u64,
    l2_checks: u64,
    l2_violations: u64,
    l3_checks: u64,
    l3_violations: u64,
    l4_checks: u64,
    l4_violations: u64,
    unabsorbed: bool,
    coarse_cells: u64,
    coarse_occupied: u64,
}

/// Counts events where the coupled pair loses its nesting.
struct InclusionTally {
    checks: u64,
    violations: u64,
}

impl CoupledObserver for InclusionTally {
    fn on_event(&mut self, _time: f64, _site: usize, fields: &[StrategyField]) {
        self.checks += 1;
        if !fields[1].is_subset_of(&fields[0]) {
            self.violations += 1;
        }
    }
}

/// Counts flips that abandon strategy 1 and keeps sampled states for the
/// closure comparison.
struct TrajectoryTally {
    events: u64,
    losses: u64,
    samples: Vec<StrategyField>,
}

impl SimObserver for TrajectoryTally {
    fn on_sample(&mut self, _time: f64, field: &StrategyField) {
        self.samples.push(field.clone());
    }

    fn on_event(
        &mut self,
        _time: f64,
        _site: usize,
        change: Option<Strategy>,
        _field: &StrategyField,
    ) {
        self.events += 1;
        if change == Some(Strategy::Two) {
            self.losses += 1;
        }
    }
}

fn run_seed(
    geometry: &LatticeGeometry,
    settings: &VerifySettings,
    replica: u64,
    check_inclusion: bool,
    check_expansion: bool,
) -> Result<SeedFindings> {
    let base = derive_seed(settings.master_seed, replica);
    let mut out = SeedFindings::default();

    if check_inclusion {
        let larger = StrategyField::random(geometry, settings.p, derive_seed(base, 1))?;
        let mut smaller = larger.clone();
        for (k, index) in larger.one_indices().into_iter().enumerate() {
            if k % 3 == 0 {
                smaller.set_at(index, Strategy::Two);
            }
        }
        let mut tally = InclusionTally {
            checks: 0,
            violations: 0,
        };
        let reports = simulate_coupled_observed(
            &[larger, smaller],
            &settings.params,
            settings.t_max,
            derive_seed(base, 2),
            &mut tally,
        )?;
        if !reports[1].final_field.is_subset_of(&reports[0].final_field) {
            tally.violations += 1;
        }
        tally.checks += 1;
        out.l1_checks = tally.checks;
        out.l1_violations = tally.violations;
    }

    // One block-union run serves L2 (flip direction), L3 (closure of
    // sampled states) and L4 (block-lattice growth bound).
    let raw = StrategyField::random(geometry, settings.p, derive_seed(base, 3))?;
    out.coarse_cells = (geometry.site_count() >> geometry.dimension()) as u64;
    out.coarse_occupied = hypercubic_view(&raw).occupied_count() as u64;

    if check_expansion {
        let initial = sparse_reduce(&raw);
        let sample_every = settings
            .record_every
            .unwrap_or(settings.t_max / 8.0)
            .max(f64::MIN_POSITIVE);
        let mut tally = TrajectoryTally {
            events: 0,
            losses: 0,
            samples: Vec::new(),
        };
        let report = simulate_active_set_observed(
            &initial,
            &settings.params,
            settings.t_max,
            derive_seed(base, 4),
            sample_every,
            &mut tally,
        );
        out.l2_checks = tally.events;
        out.l2_violations = tally.losses;

        if report.absorbed {
            for state in &tally.samples {
                out.l3_checks += 1;
                match response_closure(state, &settings.params) {
                    Ok(closure) if closure == report.final_field => {}
                    _ => out.l3_violations += 1,
                }
            }

            out.l4_checks = 1;
            let threshold = geometry.dimension();
            let grown = bootstrap_limit(&hypercubic_view(&initial), threshold);
            if !grown.is_subset_of(&hypercubic_view(&report.final_field)) {
                out.l4_violations = 1;
            }
        } else {
            out.unabsorbed = true;
        }
    }

    Ok(out)
}

/// Run the whole suite. Replicas run in parallel on the current rayon
/// pool; tallies merge in replica order so reports are deterministic.
pub fn verify_suite(settings: &VerifySettings) -> Result<VerifyOutcome> {
    let geometry = LatticeGeometry::new(&settings.sides)?;
    let a1 = settings.params.a1();
    let a2 = settings.params.a2();
    let check_inclusion = a1 > 0.0 && a2 > 0.0;
    let check_expansion = a1 > a2 && a2 > 0.0;

    let per_seed: Vec<Result<SeedFindings>> = (0..settings.seeds)
        .into_par_iter()
        .map(|replica| run_seed(&geometry, settings, replica, check_inclusion, check_expansion))
        .collect();
    let mut merged = SeedFindings::default();
    let mut unabsorbed_seeds = 0u64;
    for finding in per_seed {
        let finding = finding?;
        merged.l1_checks += finding.l1_checks;
        merged.l1_violations += finding.l1_violations;
        merged.l2_checks += finding.l2_checks;
        merged.l2_violations += finding.l2_violations;
        merged.l3_checks += finding.l3_checks;
        merged.l3_violations += finding.l3_violations;
        merged.l4_checks += finding.l4_checks;
        merged.l4_violations += finding.l4_violations;
        merged.coarse_cells += finding.coarse_cells;
        merged.coarse_occupied += finding.coarse_occupied;
        if finding.unabsorbed {
            unabsorbed_seeds += 1;
        }
    }

    let mut items = Vec::new();

    items.push(counted_item(
        "L1",
        "coupled-inclusion",
        check_inclusion.then_some((merged.l1_checks, merged.l1_violations)),
        "needs a1 > 0 and a2 > 0",
        format!("{} seeds", settings.seeds),
    ));
    items.push(counted_item(
        "L2",
        "expanding-trajectory",
        check_expansion.then_some((merged.l2_checks, merged.l2_violations)),
        "needs a1 > a2 > 0",
        format!("{} seeds", settings.seeds),
    ));

    let unabsorbed_note = if unabsorbed_seeds > 0 {
        format!(
            "{} seeds; {unabsorbed_seeds} unabsorbed seeds skipped",
            settings.seeds
        )
    } else {
        format!("{} seeds", settings.seeds)
    };
    items.push(counted_item(
        "L3",
        "closure-endpoint",
        check_expansion.then_some((merged.l3_checks, merged.l3_violations)),
        "needs a1 > a2 > 0",
        unabsorbed_note.clone(),
    ));
    items.push(counted_item(
        "L4",
        "block-threshold-bound",
        check_expansion.then_some((merged.l4_checks, merged.l4_violations)),
        "needs a1 > a2 > 0",
        unabsorbed_note,
    ));

    items.push(block_density_item(
        geometry.dimension(),
        settings.p,
        merged.coarse_cells,
        merged.coarse_occupied,
    ));

    Ok(VerifyOutcome { items })
}

fn counted_item(
    id: &'static str,
    label: &'static str,
    counts: Option<(u64, u64)>,
    skip_reason: &str,
    detail: String,
) -> VerifyItem {
    match counts {
        None => VerifyItem {
            id,
            label,
            status: CheckStatus::Skipped(skip_reason.to_string()),
            checks: 0,
            violations: 0,
            detail: String::new(),
        },
        Some((checks, violations)) => VerifyItem {
            id,
            label,
            status: if violations == 0 {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            checks,
            violations,
            detail,
        },
    }
}

fn block_density_item(dimension: usize, p: f64, cells: u64, occupied: u64) -> VerifyItem {
    let expected = p.powi(1 << dimension as i32);
    let n = cells as f64;
    let observed = occupied as f64 / n;
    let band = Z_BAND * (expected * (1.0 - expected) / n).sqrt();
    let within = (observed - expected).abs() <= band;
    VerifyItem {
        id: "L5",
        label: "block-density",
        status: if within {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        checks: cells,
        violations: u64::from(!within),
        detail: format!("observed {observed:.5} vs expected {expected:.5} (band {band:.5})"),
    }
}
