//! The simulators: uniform-clock and active-set schedulers, plus coupled
//! runs that drive several configurations with one shared event stream.

use super::active_set::IndexedSet;
use super::report::{RunReport, SeriesRecorder, SeriesSample};
use super::stream::EventStream;
use crate::error::Error;
use crate::lattice::{flip_target_at, GameParams, Strategy, StrategyField};
use crate::Result;

/// Hooks into a running simulation. `on_sample` fires at every recorded
/// series row with the state at that time; `on_event` fires after each
/// processed event with the post-event state and the change applied (if any).
pub trait SimObserver {
    fn on_sample(&mut self, _time: f64, _field: &StrategyField) {}
    fn on_event(
        &mut self,
        _time: f64,
        _site: usize,
        _change: Option<Strategy>,
        _field: &StrategyField,
    ) {
    }
}

impl SimObserver for () {}

/// Hook into a coupled run: fires after each shared event has been applied
/// to every configuration.
pub trait CoupledObserver {
    fn on_event(&mut self, _time: f64, _site: usize, _fields: &[StrategyField]) {}
}

impl CoupledObserver for () {}

fn seed_active_set(field: &StrategyField, params: &GameParams) -> IndexedSet {
    let n = field.geometry().site_count();
    let mut active = IndexedSet::new(n);
    for site in 0..n {
        if flip_target_at(field, params, site).is_some() {
            active.insert(site);
        }
    }
    active
}

fn refresh_one(active: &mut IndexedSet, field: &StrategyField, params: &GameParams, site: usize) {
    if flip_target_at(field, params, site).is_some() {
        active.insert(site);
    } else {
        active.remove(site);
    }
}

/// A flip at `site` can only change eligibility of the site itself and its
/// `2d` neighbours; nothing else sees a changed neighbourhood.
fn refresh_neighborhood(
    active: &mut IndexedSet,
    field: &StrategyField,
    params: &GameParams,
    site: usize,
) {
    refresh_one(active, field, params, site);
    let geometry = field.geometry();
    for axis in 0..geometry.dimension() {
        refresh_one(active, field, params, geometry.step(site, axis, false));
        refresh_one(active, field, params, geometry.step(site, axis, true));
    }
}

/// Run the dynamics with every site's clock realised: gaps at total rate
/// `n`, sites picked uniformly, events at satisfied sites doing nothing.
/// Stops at the first fixed point or at `t_max`.
pub fn simulate(
    initial: &StrategyField,
    params: &GameParams,
    t_max: f64,
    seed: u64,
    record_every: f64,
) -> RunReport {
    simulate_observed(initial, params, t_max, seed, record_every, &mut ())
}

/// [`simulate`] with observer hooks.
pub fn simulate_observed(
    initial: &StrategyField,
    params: &GameParams,
    t_max: f64,
    seed: u64,
    record_every: f64,
    observer: &mut impl SimObserver,
) -> RunReport {
    assert!(t_max > 0.0, "t_max must be positive");
    let mut field = initial.clone();
    let n = field.geometry().site_count();
    let mut active = seed_active_set(&field, params);
    let mut stream = EventStream::new(seed);
    let mut recorder = SeriesRecorder::new(record_every);
    recorder.start(&field, active.len());
    observer.on_sample(0.0, &field);

    let mut flips = 0u64;
    let mut events = 0u64;
    let mut absorbed_at = active.is_empty().then_some(0.0);
    while absorbed_at.is_none() {
        let ev = stream.next_event(n).expect("site count is positive");
        if ev.time > t_max {
            break;
        }
        recorder.flush_before(ev.time, &field, flips, active.len(), |t, f| {
            observer.on_sample(t, f)
        });
        let change = flip_target_at(&field, params, ev.pick);
        if let Some(new) = change {
            field.set_at(ev.pick, new);
            flips += 1;
            refresh_neighborhood(&mut active, &field, params, ev.pick);
            if active.is_empty() {
                absorbed_at = Some(ev.time);
            }
        }
        events += 1;
        observer.on_event(ev.time, ev.pick, change, &field);
    }

    let end = absorbed_at.unwrap_or(t_max);
    let series = recorder.finish(end, &field, flips, active.len(), |t, f| {
        observer.on_sample(t, f)
    });
    RunReport {
        final_field: field,
        absorbed: absorbed_at.is_some(),
        absorption_time: absorbed_at,
        series,
        events_processed: events,
    }
}

/// Run the dynamics scheduling only sites that would actually switch: gaps
/// at rate `|active|`, picks uniform over the active set. Equal in law to
/// [`simulate`] (every event there either flips an active site or does
/// nothing), and far faster when activity is sparse.
pub fn simulate_active_set(
    initial: &StrategyField,
    params: &GameParams,
    t_max: f64,
    seed: u64,
    record_every: f64,
) -> RunReport {
    simulate_active_set_observed(initial, params, t_max, seed, record_every, &mut ())
}

/// [`simulate_active_set`] with observer hooks.
pub fn simulate_active_set_observed(
    initial: &StrategyField,
    params: &GameParams,
    t_max: f64,
    seed: u64,
    record_every: f64,
    observer: &mut impl SimObserver,
) -> RunReport {
    assert!(t_max > 0.0, "t_max must be positive");
    let mut field = initial.clone();
    let mut active = seed_active_set(&field, params);
    let mut stream = EventStream::new(seed);
    let mut recorder = SeriesRecorder::new(record_every);
    recorder.start(&field, active.len());
    observer.on_sample(0.0, &field);

    let mut flips = 0u64;
    let mut events = 0u64;
    let mut absorbed_at = active.is_empty().then_some(0.0);
    while absorbed_at.is_none() {
        // The gap uses the current active count; re-drawing after each flip
        // is exact because exponential clocks are memoryless.
        let ev = stream.next_event(active.len()).expect("active set nonempty");
        if ev.time > t_max {
            break;
        }
        recorder.flush_before(ev.time, &field, flips, active.len(), |t, f| {
            observer.on_sample(t, f)
        });
        let site = active.get(ev.pick);
        let change = flip_target_at(&field, params, site);
        debug_assert!(change.is_some(), "active set held a satisfied site");
        if let Some(new) = change {
            field.set_at(site, new);
            flips += 1;
            refresh_neighborhood(&mut active, &field, params, site);
            if active.is_empty() {
                absorbed_at = Some(ev.time);
            }
        }
        events += 1;
        observer.on_event(ev.time, site, change, &field);
    }

    let end = absorbed_at.unwrap_or(t_max);
    let series = recorder.finish(end, &field, flips, active.len(), |t, f| {
        observer.on_sample(t, f)
    });
    RunReport {
        final_field: field,
        absorbed: absorbed_at.is_some(),
        absorption_time: absorbed_at,
        series,
        events_processed: events,
    }
}

/// Drive several configurations with one shared event stream: identical
/// `(time, site)` events applied to each. With ordered initial data this
/// realises the monotone coupling, so inclusions persist event by event.
pub fn simulate_coupled(
    fields: &[StrategyField],
    params: &GameParams,
    t_max: f64,
    seed: u64,
) -> Result<Vec<RunReport>> {
    simulate_coupled_observed(fields, params, t_max, seed, &mut ())
}

/// [`simulate_coupled`] with a per-event hook over all configurations.
pub fn simulate_coupled_observed(
    fields: &[StrategyField],
    params: &GameParams,
    t_max: f64,
    seed: u64,
    observer: &mut impl CoupledObserver,
) -> Result<Vec<RunReport>> {
    assert!(t_max > 0.0, "t_max must be positive");
    if fields.is_empty() {
        return Ok(Vec::new());
    }
    let geometry = fields[0].geometry().clone();
    if fields.iter().any(|f| f.geometry() != &geometry) {
        return Err(Error::GeometryMismatch);
    }
    let n = geometry.site_count();
    let k = fields.len();
    let mut states: Vec<StrategyField> = fields.to_vec();
    let mut actives: Vec<IndexedSet> =
        states.iter().map(|f| seed_active_set(f, params)).collect();
    let mut absorbed: Vec<Option<f64>> = actives
        .iter()
        .map(|a| a.is_empty().then_some(0.0))
        .collect();
    let mut flips = vec![0u64; k];
    let starts: Vec<SeriesSample> = states
        .iter()
        .zip(&actives)
        .map(|(f, a)| SeriesSample {
            time: 0.0,
            density_one: f.density_one(),
            flips: 0,
            active: a.len(),
        })
        .collect();

    let mut stream = EventStream::new(seed);
    let mut events = 0u64;
    while absorbed.iter().any(Option::is_none) {
        let ev = stream.next_event(n).expect("site count is positive");
        if ev.time > t_max {
            break;
        }
        for i in 0..k {
            if absorbed[i].is_some() {
                // A fixed point stays fixed: no event can move it again.
                continue;
            }
            if let Some(new) = flip_target_at(&states[i], params, ev.pick) {
                states[i].set_at(ev.pick, new);
                flips[i] += 1;
                refresh_neighborhood(&mut actives[i], &states[i], params, ev.pick);
                if actives[i].is_empty() {
                    absorbed[i] = Some(ev.time);
                }
            }
        }
        events += 1;
        observer.on_event(ev.time, ev.pick, &states);
    }

    let reports = states
        .into_iter()
        .enumerate()
        .map(|(i, field)| {
            let end = absorbed[i].unwrap_or(t_max);
            let end_row = SeriesSample {
                time: end,
                density_one: field.density_one(),
                flips: flips[i],
                active: actives[i].len(),
            };
            let series = if end == 0.0 {
                vec![end_row]
            } else {
                vec![starts[i], end_row]
            };
            RunReport {
                final_field: field,
                absorbed: absorbed[i].is_some(),
                absorption_time: absorbed[i],
                series,
                events_processed: events,
            }
        })
        .collect();
    Ok(reports)
}
