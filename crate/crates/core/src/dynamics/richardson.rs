//! Rate-1 neighbour-growth process and its pathwise comparison with the
//! strategy dynamics.
//!
//! A healthy site with at least one infected neighbour becomes infected at
//! rate 1; infection is permanent. When `a1 > (2d-1)*a2 > 0`, one infected
//! neighbour already wins the payoff comparison for strategy 1 no matter
//! what the other `2d-1` neighbours play, so a growth process started
//! inside the strategy-1 set stays inside it when both are driven by the
//! same event stream. [`check_richardson_domination`] runs that coupling
//! and counts inclusion failures (expected: none).

use super::active_set::IndexedSet;
use super::stream::EventStream;
use crate::error::Error;
use crate::lattice::{flip_target_at, Bits, GameParams, LatticeGeometry, SiteId, StrategyField};
use crate::Result;

/// Set of infected sites on a periodic lattice. Infection only ever grows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfectionField {
    geometry: LatticeGeometry,
    infected: Bits,
}

impl InfectionField {
    /// No site infected.
    pub fn empty(geometry: &LatticeGeometry) -> Self {
        Self {
            geometry: geometry.clone(),
            infected: Bits::new(geometry.site_count()),
        }
    }

    /// Infection consisting exactly of the given sites.
    pub fn from_infected_sites<'a>(
        geometry: &LatticeGeometry,
        sites: impl IntoIterator<Item = &'a SiteId>,
    ) -> Self {
        let mut field = Self::empty(geometry);
        for site in sites {
            field.infect_at(geometry.linear_index(site));
        }
        field
    }

    pub fn geometry(&self) -> &LatticeGeometry {
        &self.geometry
    }

    #[inline]
    pub fn is_infected_at(&self, index: usize) -> bool {
        self.infected.get(index)
    }

    pub fn is_infected(&self, site: &SiteId) -> bool {
        self.is_infected_at(self.geometry.linear_index(site))
    }

    #[inline]
    pub fn infect_at(&mut self, index: usize) {
        self.infected.set(index, true);
    }

    pub fn infected_count(&self) -> usize {
        self.infected.count_ones()
    }

    pub fn infected_fraction(&self) -> f64 {
        self.infected_count() as f64 / self.geometry.site_count() as f64
    }

    pub fn is_empty(&self) -> bool {
        self.infected_count() == 0
    }

    pub fn is_full(&self) -> bool {
        self.infected_count() == self.geometry.site_count()
    }

    /// Number of infected neighbours of `index`.
    #[inline]
    pub fn infected_neighbor_count_at(&self, index: usize) -> usize {
        let mut count = 0;
        for axis in 0..self.geometry.dimension() {
            count += usize::from(self.infected.get(self.geometry.step(index, axis, false)));
            count += usize::from(self.infected.get(self.geometry.step(index, axis, true)));
        }
        count
    }

    /// True when every infected site plays strategy 1 in `field`.
    ///
    /// Panics if the geometries differ.
    pub fn dominated_by(&self, field: &StrategyField) -> bool {
        assert_eq!(
            &self.geometry,
            field.geometry(),
            "cannot compare fields on different lattices"
        );
        self.infected.is_subset_of(field.ones_bits())
    }
}

/// Infection seeding for the comparison run: a site starts infected when it
/// plays strategy 1 and has at least one strategy-1 neighbour. (A site with
/// a strategy-1 neighbour keeps winning the payoff comparison under the
/// domination condition; an isolated strategy-1 site need not.)
pub fn richardson_init(field: &StrategyField) -> InfectionField {
    let mut infection = InfectionField::empty(field.geometry());
    for index in field.one_indices() {
        let (n1, _) = field.neighbor_counts_at(index);
        if n1 >= 1 {
            infection.infect_at(index);
        }
    }
    infection
}

/// Result of a pure growth run.
#[derive(Clone, Debug)]
pub struct RichardsonReport {
    pub final_field: InfectionField,
    /// `(time, infected fraction)` rows on the recording grid.
    pub series: Vec<(f64, f64)>,
    /// Whether every site was infected by the end of the run.
    pub filled: bool,
    /// Time the last healthy site was infected, if that happened.
    pub fill_time: Option<f64>,
    pub events_processed: u64,
}

/// Grid sampler for `(time, fraction)` traces: rows at multiples of
/// `every` (pre-event state) plus the exact start and end times.
struct FractionTrace {
    every: f64,
    next_tick: u64,
    rows: Vec<(f64, f64)>,
}

impl FractionTrace {
    fn new(every: f64) -> Self {
        let every = if every > 0.0 { every } else { f64::INFINITY };
        Self {
            every,
            next_tick: 1,
            rows: Vec::new(),
        }
    }

    fn start(&mut self, fraction: f64) {
        self.rows.push((0.0, fraction));
    }

    fn flush_before(&mut self, upto: f64, fraction: f64) {
        loop {
            let t = self.every * self.next_tick as f64;
            if t >= upto {
                break;
            }
            self.rows.push((t, fraction));
            self.next_tick += 1;
        }
    }

    fn finish(mut self, end: f64, fraction: f64) -> Vec<(f64, f64)> {
        loop {
            let t = self.every * self.next_tick as f64;
            if t > end {
                break;
            }
            self.rows.push((t, fraction));
            self.next_tick += 1;
        }
        if self.rows.last().map(|r| r.0) != Some(end) {
            self.rows.push((end, fraction));
        }
        self.rows
    }
}

/// Run the growth process alone, scheduling only the boundary (healthy
/// sites with an infected neighbour), until full or `t_max`.
pub fn simulate_richardson(
    initial: &InfectionField,
    t_max: f64,
    seed: u64,
    record_every: f64,
) -> RichardsonReport {
    assert!(t_max > 0.0, "t_max must be positive");
    let mut infection = initial.clone();
    let geometry = infection.geometry().clone();
    let n = geometry.site_count();
    let mut boundary = IndexedSet::new(n);
    for index in 0..n {
        if !infection.is_infected_at(index) && infection.infected_neighbor_count_at(index) >= 1 {
            boundary.insert(index);
        }
    }

    let mut stream = EventStream::new(seed);
    let mut trace = FractionTrace::new(record_every);
    trace.start(infection.infected_fraction());
    let mut events = 0u64;
    let mut fill_time = infection.is_full().then_some(0.0);
    while !boundary.is_empty() {
        let ev = stream.next_event(boundary.len()).expect("boundary nonempty");
        if ev.time > t_max {
            break;
        }
        trace.flush_before(ev.time, infection.infected_fraction());
        let site = boundary.get(ev.pick);
        infection.infect_at(site);
        boundary.remove(site);
        for axis in 0..geometry.dimension() {
            for up in [false, true] {
                let nb = geometry.step(site, axis, up);
                if !infection.is_infected_at(nb) {
                    boundary.insert(nb);
                }
            }
        }
        events += 1;
        if boundary.is_empty() && infection.is_full() {
            fill_time = Some(ev.time);
        }
    }

    let end = fill_time.unwrap_or(t_max).min(t_max);
    let series = trace.finish(end, infection.infected_fraction());
    RichardsonReport {
        filled: infection.is_full(),
        fill_time,
        final_field: infection,
        series,
        events_processed: events,
    }
}

/// Outcome of the coupled strategy/growth comparison run.
#[derive(Clone, Debug)]
pub struct DominationReport {
    /// Events after which the infected set was not contained in the
    /// strategy-1 set.
    pub violations: u64,
    /// Time and site of the first containment failure, if any.
    pub first_violation: Option<(f64, usize)>,
    pub events_processed: u64,
    pub final_strategy: StrategyField,
    pub final_infection: InfectionField,
    /// First time the strategy field reached the all-1 consensus, if it did.
    pub time_all_one: Option<f64>,
}

/// Couple the strategy dynamics to the growth process seeded by
/// [`richardson_init`], both driven by one full-lattice event stream, and
/// verify after every event that infection stays inside the strategy-1 set.
///
/// Requires `a1 > (2d-1)*a2 > 0`; other parameters are rejected because
/// the containment argument needs a single strategy-1 neighbour to decide
/// the payoff comparison.
pub fn check_richardson_domination(
    initial: &StrategyField,
    params: &GameParams,
    t_max: f64,
    seed: u64,
) -> Result<DominationReport> {
    assert!(t_max > 0.0, "t_max must be positive");
    let geometry = initial.geometry().clone();
    let degree = geometry.neighbor_count() as f64;
    if !(params.a2() > 0.0 && params.a1() > (degree - 1.0) * params.a2()) {
        return Err(Error::InvalidInput(format!(
            "domination check needs a1 > {}*a2 > 0, got a1={}, a2={}",
            degree - 1.0,
            params.a1(),
            params.a2()
        )));
    }

    let n = geometry.site_count();
    let mut strategy = initial.clone();
    let mut infection = richardson_init(initial);
    let mut active = IndexedSet::new(n);
    for site in 0..n {
        if flip_target_at(&strategy, params, site).is_some() {
            active.insert(site);
        }
    }

    let mut stream = EventStream::new(seed);
    let mut events = 0u64;
    let mut violations = 0u64;
    let mut first_violation = None;
    let all_one = |f: &StrategyField| f.count_one() == n;
    let mut time_all_one = all_one(&strategy).then_some(0.0);

    // Early exit once nothing can change on either side: the strategy field
    // is frozen, and the infection is frozen (empty or full) or irrelevant
    // because the whole lattice already plays 1.
    let done = |active: &IndexedSet, inf: &InfectionField, t1: Option<f64>| {
        active.is_empty() && (inf.is_empty() || inf.is_full() || t1.is_some())
    };

    while !done(&active, &infection, time_all_one) {
        let ev = stream.next_event(n).expect("site count is positive");
        if ev.time > t_max {
            break;
        }
        // Each transition reads only its own pre-event state, so applying
        // the strategy flip first cannot influence the infection step.
        let change = flip_target_at(&strategy, params, ev.pick);
        let infects =
            !infection.is_infected_at(ev.pick) && infection.infected_neighbor_count_at(ev.pick) >= 1;
        if let Some(new) = change {
            strategy.set_at(ev.pick, new);
            let geometry = strategy.geometry();
            let mut refresh = |s: usize| {
                if flip_target_at(&strategy, params, s).is_some() {
                    active.insert(s);
                } else {
                    active.remove(s);
                }
            };
            refresh(ev.pick);
            for axis in 0..geometry.dimension() {
                refresh(geometry.step(ev.pick, axis, false));
                refresh(geometry.step(ev.pick, axis, true));
            }
        }
        if infects {
            infection.infect_at(ev.pick);
        }
        events += 1;
        if time_all_one.is_none() && all_one(&strategy) {
            time_all_one = Some(ev.time);
        }
        if !infection.dominated_by(&strategy) {
            violations += 1;
            if first_violation.is_none() {
                first_violation = Some((ev.time, ev.pick));
            }
        }
    }

    Ok(DominationReport {
        violations,
        first_violation,
        events_processed: events,
        final_strategy: strategy,
        final_infection: infection,
        time_all_one,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Strategy;

    fn torus(sides: &[usize]) -> LatticeGeometry {
        LatticeGeometry::new(sides).unwrap()
    }

    #[test]
    fn init_keeps_only_sites_with_a_like_minded_neighbor() {
        let g = torus(&[8]);
        // Sites 2,3 adjacent; site 6 isolated.
        let field =
            StrategyField::from_one_sites(&g, [&g.site(&[2]), &g.site(&[3]), &g.site(&[6])]);
        let infection = richardson_init(&field);
        assert!(infection.is_infected(&g.site(&[2])));
        assert!(infection.is_infected(&g.site(&[3])));
        assert!(!infection.is_infected(&g.site(&[6])));
        assert_eq!(infection.infected_count(), 2);
    }

    #[test]
    fn init_sees_adjacency_across_the_wrap() {
        let g = torus(&[8]);
        let field = StrategyField::from_one_sites(&g, [&g.site(&[0]), &g.site(&[7])]);
        assert_eq!(richardson_init(&field).infected_count(), 2);
    }

    #[test]
    fn init_of_consensus_is_everything() {
        let g = torus(&[4, 4]);
        let field = StrategyField::uniform(&g, Strategy::One);
        assert!(richardson_init(&field).is_full());
    }

    #[test]
    fn growth_from_empty_never_starts() {
        let g = torus(&[6, 6]);
        let run = simulate_richardson(&InfectionField::empty(&g), 50.0, 1, 0.0);
        assert!(run.final_field.is_empty());
        assert!(!run.filled);
        assert_eq!(run.fill_time, None);
        assert_eq!(run.events_processed, 0);
    }

    #[test]
    fn growth_from_full_is_already_done() {
        let g = torus(&[4, 4]);
        let mut full = InfectionField::empty(&g);
        for i in 0..g.site_count() {
            full.infect_at(i);
        }
        let run = simulate_richardson(&full, 10.0, 2, 0.0);
        assert!(run.filled);
        assert_eq!(run.fill_time, Some(0.0));
        assert_eq!(run.events_processed, 0);
        assert_eq!(run.series, vec![(0.0, 1.0)]);
    }

    #[test]
    fn seeded_pair_fills_a_small_torus() {
        let g = torus(&[6, 6]);
        let seedling =
            InfectionField::from_infected_sites(&g, [&g.site(&[0, 0]), &g.site(&[0, 1])]);
        let run = simulate_richardson(&seedling, 1000.0, 9, 5.0);
        assert!(run.filled, "growth should engulf a 6x6 torus well before t=1000");
        let fill = run.fill_time.unwrap();
        assert!(fill > 0.0);
        // Exactly one infection event per initially healthy site.
        assert_eq!(run.events_processed, (g.site_count() - 2) as u64);
        // Fraction trace is nondecreasing and ends at 1.
        for w in run.series.windows(2) {
            assert!(w[0].0 < w[1].0, "times strictly increase");
            assert!(w[0].1 <= w[1].1, "infection only grows");
        }
        assert_eq!(run.series.last().unwrap(), &(fill, 1.0));
    }

    #[test]
    fn growth_is_reproducible_and_seed_sensitive() {
        let g = torus(&[8, 8]);
        let seedling =
            InfectionField::from_infected_sites(&g, [&g.site(&[3, 3]), &g.site(&[3, 4])]);
        let a = simulate_richardson(&seedling, 200.0, 11, 0.0);
        let b = simulate_richardson(&seedling, 200.0, 11, 0.0);
        assert_eq!(a.fill_time, b.fill_time);
        let c = simulate_richardson(&seedling, 200.0, 12, 0.0);
        assert_ne!(a.fill_time, c.fill_time);
    }

    #[test]
    fn domination_requires_the_strong_parameter_gap() {
        let g = torus(&[8, 8]);
        let field = StrategyField::random(&g, 0.4, 1).unwrap();
        // In d=2 the condition is a1 > 3*a2 > 0.
        let weak = GameParams::new(1.01, 1.0).unwrap();
        assert!(matches!(
            check_richardson_domination(&field, &weak, 10.0, 1),
            Err(Error::InvalidInput(_))
        ));
        let negative = GameParams::new(4.0, -1.0).unwrap();
        assert!(matches!(
            check_richardson_domination(&field, &negative, 10.0, 1),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn domination_holds_on_a_small_torus() {
        let g = torus(&[8, 8]);
        let params = GameParams::new(3.25, 1.0).unwrap();
        for seed in 0..8 {
            let field = StrategyField::random(&g, 0.4, seed).unwrap();
            let report =
                check_richardson_domination(&field, &params, 400.0, 1000 + seed).unwrap();
            assert_eq!(report.violations, 0, "seed {seed} broke containment");
            assert_eq!(report.first_violation, None);
            // Containment still holds at the end of the run.
            assert!(report.final_infection.dominated_by(&report.final_strategy));
            if report.time_all_one.is_some() {
                assert_eq!(report.final_strategy.count_one(), g.site_count());
            }
        }
    }

    #[test]
    fn domination_run_with_seeded_pair_reaches_consensus_in_one_dimension() {
        let g = torus(&[64]);
        let params = GameParams::new(2.0, 1.0).unwrap(); // a1 > 1*a2 in d=1
        let field = StrategyField::from_one_sites(&g, [&g.site(&[10]), &g.site(&[11])]);
        let report = check_richardson_domination(&field, &params, 2000.0, 5).unwrap();
        assert_eq!(report.violations, 0);
        assert!(
            report.time_all_one.is_some(),
            "an adjacent pair should take over the ring"
        );
        assert!(report.final_infection.is_full());
    }
}
