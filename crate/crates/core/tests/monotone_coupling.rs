//! Attractiveness of the dynamics for positive reduced payoffs: growing
//! the strategy-1 set can only raise every `N1` and lower every `N2`, so
//! under the shared event stream an initial inclusion survives every
//! event, ties included.

use latgame_core::dynamics::{simulate_coupled_observed, CoupledObserver};
use latgame_core::lattice::{GameParams, LatticeGeometry, Strategy, StrategyField};
use proptest::prelude::*;

struct InclusionWatch {
    violations: u64,
}

impl CoupledObserver for InclusionWatch {
    fn on_event(&mut self, _time: f64, _site: usize, fields: &[StrategyField]) {
        if !fields[0].is_subset_of(&fields[1]) {
            self.violations += 1;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn shared_stream_preserves_inclusion_for_positive_params(
        seed in 0u64..100_000,
        p in 0.2f64..0.7,
        drop_mod in 2usize..6,
        a1q in 1u32..13,
        a2q in 1u32..13,
    ) {
        let g = LatticeGeometry::new(&[8, 8]).unwrap();
        let larger = StrategyField::random(&g, p, seed).unwrap();
        let mut smaller = larger.clone();
        for index in larger.one_indices().collect::<Vec<_>>() {
            if index % drop_mod == 0 {
                smaller.set_at(index, Strategy::Two);
            }
        }
        prop_assert!(smaller.is_subset_of(&larger));

        let params = GameParams::new(a1q as f64 / 4.0, a2q as f64 / 4.0).unwrap();
        let mut watch = InclusionWatch { violations: 0 };
        let reports =
            simulate_coupled_observed(&[smaller, larger], &params, 30.0, seed ^ 0xABCD, &mut watch)
                .unwrap();
        prop_assert_eq!(watch.violations, 0);
        prop_assert!(reports[0].final_field.is_subset_of(&reports[1].final_field));
    }
}
