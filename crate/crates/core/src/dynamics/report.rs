//! Run artifacts: the sampled time series and the end-of-run report.

use crate::lattice::StrategyField;

/// One row of the sampled time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSample {
    pub time: f64,
    /// Fraction of sites playing strategy 1.
    pub density_one: f64,
    /// Cumulative number of strategy changes up to this time.
    pub flips: u64,
    /// Sites that would switch if updated right now.
    pub active: usize,
}

/// What a finished run hands back.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub final_field: StrategyField,
    /// Whether the run reached a fixed point before the horizon.
    pub absorbed: bool,
    /// Time the active set first emptied; `Some(0.0)` if the initial
    /// configuration was already a fixed point, `None` if the horizon hit.
    pub absorption_time: Option<f64>,
    /// Samples at time 0, every `record_every` units, and the end of run.
    pub series: Vec<SeriesSample>,
    /// Events drawn from the stream and applied (the uniform-clock scheduler
    /// counts no-op events too; the active-set scheduler only flips).
    pub events_processed: u64,
}

/// Emits series rows on a fixed grid plus the exact start and end, using the
/// pre-event state for every grid time crossed.
pub(crate) struct SeriesRecorder {
    every: f64,
    next_tick: u64,
    samples: Vec<SeriesSample>,
}

impl SeriesRecorder {
    /// `every <= 0` (or NaN) records only the start and end rows.
    pub fn new(every: f64) -> Self {
        Self {
            every,
            next_tick: 1,
            samples: Vec::new(),
        }
    }

    fn push(&mut self, time: f64, field: &StrategyField, flips: u64, active: usize) {
        self.samples.push(SeriesSample {
            time,
            density_one: field.density_one(),
            flips,
            active,
        });
    }

    pub fn start(&mut self, field: &StrategyField, active: usize) {
        self.push(0.0, field, 0, active);
    }

    /// Emit every grid time in `(last, upto)` using the current state.
    pub fn flush_before(
        &mut self,
        upto: f64,
        field: &StrategyField,
        flips: u64,
        active: usize,
        mut on_sample: impl FnMut(f64, &StrategyField),
    ) {
        if !(self.every > 0.0) {
            return;
        }
        loop {
            let grid = self.every * self.next_tick as f64;
            if grid >= upto {
                break;
            }
            self.push(grid, field, flips, active);
            on_sample(grid, field);
            self.next_tick += 1;
        }
    }

    /// Seal the series at `end`: emit remaining grid times up to and
    /// including `end`, then the exact end row if the grid missed it.
    pub fn finish(
        &mut self,
        end: f64,
        field: &StrategyField,
        flips: u64,
        active: usize,
        mut on_sample: impl FnMut(f64, &StrategyField),
    ) -> Vec<SeriesSample> {
        if self.every > 0.0 {
            loop {
                let grid = self.every * self.next_tick as f64;
                if grid > end {
                    break;
                }
                self.push(grid, field, flips, active);
                on_sample(grid, field);
                self.next_tick += 1;
            }
        }
        if self.samples.last().map(|s| s.time) != Some(end) {
            self.push(end, field, flips, active);
            on_sample(end, field);
        }
        std::mem::take(&mut self.samples)
    }
}
