//! Snapshot-panel experiment: for each initial density, run one replica
//! on a planar torus, photograph the configuration at fixed times, and
//! classify where the run is heading.

use latgame_core::dynamics::{derive_seed, simulate_active_set_observed, simulate_observed};
use latgame_core::lattice::{GameParams, LatticeGeometry, StrategyField};
use std::fmt;

use crate::config::Scheme;
use crate::error::Result;
use crate::snapshots::SnapshotSchedule;

/// Capture times for the panel; entries past `t_max` are dropped. The
/// final state is always captured separately.
pub const PANEL_TIMES: [f64; 3] = [0.0, 5.0, 25.0];

/// Densities used when the config gives no `p` of its own.
pub const DEFAULT_DENSITIES: [f64; 2] = [0.15, 0.20];

#[derive(Debug, Clone)]
pub struct FigureSettings {
    pub sides: Vec<usize>,
    pub params: GameParams,
    pub densities: Vec<f64>,
    pub t_max: f64,
    pub master_seed: u64,
    pub scheme: Scheme,
    pub record_every: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureOutcome {
    /// Strategy 1 took the whole lattice.
    AllOne,
    /// The run froze with both strategies present.
    AbsorbedMixed,
    /// Still moving at `t_max` — or frozen with no strategy-1 site left,
    /// which the panel reports the same way since it tracks strategy-1
    /// takeover, not settlement.
    Undecided,
}

impl fmt::Display for FigureOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FigureOutcome::AllOne => "all-1",
            FigureOutcome::AbsorbedMixed => "absorbed-mixed",
            FigureOutcome::Undecided => "undecided",
        })
    }
}

#[derive(Debug, Clone)]
pub struct DensityPanel {
    pub p: f64,
    pub final_density: f64,
    pub absorbed: bool,
    pub outcome: FigureOutcome,
    /// Density over the last quarter of the series kept strictly rising.
    pub still_growing: bool,
    pub snapshots: Vec<(f64, StrategyField)>,
    pub final_field: StrategyField,
    pub series: Vec<latgame_core::dynamics::SeriesSample>,
}

fn classify(final_density: f64, absorbed: bool) -> FigureOutcome {
    if final_density == 1.0 {
        FigureOutcome::AllOne
    } else if absorbed && final_density > 0.0 {
        FigureOutcome::AbsorbedMixed
    } else {
        FigureOutcome::Undecided
    }
}

fn last_quarter_rising(series: &[latgame_core::dynamics::SeriesSample]) -> bool {
    if series.len() < 2 {
        return false;
    }
    let start = (series.len() * 3) / 4;
    let window = &series[start.min(series.len() - 2)..];
    window.last().unwrap().density_one > window.first().unwrap().density_one
}

/// Run the panel for one initial density. Replica index picks the seed
/// pair, so densities get independent randomness from one master seed.
pub fn density_panel(
    settings: &FigureSettings,
    index: usize,
    p: f64,
) -> Result<DensityPanel> {
    let geometry = LatticeGeometry::new(&settings.sides)?;
    let field_seed = derive_seed(settings.master_seed, 2 * index as u64);
    let stream_seed = derive_seed(settings.master_seed, 2 * index as u64 + 1);
    let initial = StrategyField::random(&geometry, p, field_seed)?;

    let times: Vec<f64> = PANEL_TIMES
        .iter()
        .copied()
        .filter(|&t| t <= settings.t_max)
        .collect();
    let mut schedule = SnapshotSchedule::at_times(times);
    let record_every = settings
        .record_every
        .unwrap_or(settings.t_max / 40.0)
        .max(f64::MIN_POSITIVE);
    let report = match settings.scheme {
        Scheme::Active => simulate_active_set_observed(
            &initial,
            &settings.params,
            settings.t_max,
            stream_seed,
            record_every,
            &mut schedule,
        ),
        Scheme::Dense => simulate_observed(
            &initial,
            &settings.params,
            settings.t_max,
            stream_seed,
            record_every,
            &mut schedule,
        ),
    };
    let snapshots = schedule.finish(&report.final_field);

    let final_density = report.final_field.density_one();
    Ok(DensityPanel {
        p,
        final_density,
        absorbed: report.absorbed,
        outcome: classify(final_density, report.absorbed),
        still_growing: last_quarter_rising(&report.series),
        snapshots,
        final_field: report.final_field,
        series: report.series,
    })
}
