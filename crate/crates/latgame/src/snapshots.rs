//! Observer that captures exact field states at scheduled times.
//!
//! Observer events carry the post-event state. The state at a scheduled
//! time strictly between two events is the earlier post-event state,
//! which equals the later event's pre-event state — recovered by undoing
//! that event's single flip on a clone, so capture costs nothing while
//! no snapshot is due. Schedule entries at or after the last event are
//! filled from the final state, exact because nothing moves after it.

use latgame_core::dynamics::SimObserver;
use latgame_core::lattice::{Strategy, StrategyField};

pub struct SnapshotSchedule {
    times: Vec<f64>,
    next: usize,
    pub taken: Vec<(f64, StrategyField)>,
}

impl SnapshotSchedule {
    /// Capture at the given times (sorted, deduplicated).
    pub fn at_times(mut times: Vec<f64>) -> Self {
        times.sort_by(f64::total_cmp);
        times.dedup();
        Self {
            times,
            next: 0,
            taken: Vec::new(),
        }
    }

    /// Capture at `0, step, 2*step, ...` up to and including `t_max`.
    pub fn every(step: f64, t_max: f64) -> Self {
        assert!(step > 0.0 && t_max >= 0.0);
        let mut times = Vec::new();
        let mut tick = 0u64;
        loop {
            let t = step * tick as f64;
            if t > t_max {
                break;
            }
            times.push(t);
            tick += 1;
        }
        Self::at_times(times)
    }

    /// Fill every schedule entry not yet captured from the final state.
    /// Call after the run; returns the completed captures.
    pub fn finish(mut self, final_field: &StrategyField) -> Vec<(f64, StrategyField)> {
        while self.next < self.times.len() {
            self.taken.push((self.times[self.next], final_field.clone()));
            self.next += 1;
        }
        self.taken
    }
}

impl SimObserver for SnapshotSchedule {
    fn on_event(
        &mut self,
        time: f64,
        site: usize,
        change: Option<Strategy>,
        field: &StrategyField,
    ) {
        if self.next >= self.times.len() || self.times[self.next] >= time {
            return;
        }
        let mut pre = field.clone();
        if let Some(new) = change {
            pre.set_at(site, new.other());
        }
        while self.next < self.times.len() && self.times[self.next] < time {
            self.taken.push((self.times[self.next], pre.clone()));
            self.next += 1;
        }
    }
}
