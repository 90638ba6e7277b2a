//! The two schedulers realise the same law: scheduling every site at
//! rate 1 (most events doing nothing) and scheduling only sites that
//! would flip are related by thinning a Poisson stream, so observables
//! drawn from independent seeds must agree in distribution. These tests
//! compare sample means through a two-sample z statistic with a 3.29
//! band (the 99.9% two-sided normal quantile).

use latgame_core::dynamics::{simulate, simulate_active_set};
use latgame_core::lattice::{GameParams, LatticeGeometry, StrategyField};

const Z_BAND: f64 = 3.29;

fn mean_and_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

fn welch_z(a: &[f64], b: &[f64]) -> f64 {
    let (ma, va) = mean_and_var(a);
    let (mb, vb) = mean_and_var(b);
    let se = (va / a.len() as f64 + vb / b.len() as f64).sqrt();
    if se == 0.0 {
        if ma == mb {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (ma - mb).abs() / se
    }
}

#[test]
fn mid_transient_densities_agree_between_schedulers() {
    let g = LatticeGeometry::new(&[8, 8]).unwrap();
    let params = GameParams::new(1.01, 1.0).unwrap();
    let replicas = 300u64;
    let run_one = |scheduler_active: bool, replica: u64| {
        let field = StrategyField::random(&g, 0.35, 10_000 + replica).unwrap();
        let seed = 50_000 + replica * 2 + u64::from(scheduler_active);
        let report = if scheduler_active {
            simulate_active_set(&field, &params, 5.0, seed, 0.0)
        } else {
            simulate(&field, &params, 5.0, seed, 0.0)
        };
        report.final_field.density_one()
    };
    let uniform: Vec<f64> = (0..replicas).map(|r| run_one(false, r)).collect();
    let active: Vec<f64> = (0..replicas).map(|r| run_one(true, r)).collect();
    let z = welch_z(&uniform, &active);
    assert!(
        z < Z_BAND,
        "density-at-t=5 means differ beyond chance: z = {z:.3}"
    );
}

#[test]
fn absorption_times_agree_between_schedulers_on_a_ring() {
    let g = LatticeGeometry::new(&[32]).unwrap();
    let params = GameParams::new(2.0, 1.0).unwrap();
    let replicas = 300u64;
    let run_one = |scheduler_active: bool, replica: u64| {
        let field = StrategyField::random(&g, 0.3, 20_000 + replica).unwrap();
        let seed = 90_000 + replica * 2 + u64::from(scheduler_active);
        let report = if scheduler_active {
            simulate_active_set(&field, &params, 500.0, seed, 0.0)
        } else {
            simulate(&field, &params, 500.0, seed, 0.0)
        };
        report
            .absorption_time
            .expect("a 32-site ring absorbs long before t=500")
    };
    let uniform: Vec<f64> = (0..replicas).map(|r| run_one(false, r)).collect();
    let active: Vec<f64> = (0..replicas).map(|r| run_one(true, r)).collect();
    let z = welch_z(&uniform, &active);
    assert!(
        z < Z_BAND,
        "absorption-time means differ beyond chance: z = {z:.3}"
    );
}

#[test]
fn event_counts_reflect_the_thinning_relation() {
    // Over the same horizon the uniform-clock run processes roughly
    // site_count * t events, while the active-set run processes exactly
    // its flips; flips per unit area are far below one per site per unit
    // time once activity is sparse.
    let g = LatticeGeometry::new(&[16, 16]).unwrap();
    let params = GameParams::new(1.01, 1.0).unwrap();
    let field = StrategyField::random(&g, 0.35, 7).unwrap();
    let dense = simulate(&field, &params, 20.0, 11, 0.0);
    let lean = simulate_active_set(&field, &params, 20.0, 11, 0.0);
    assert!(dense.events_processed > lean.events_processed);
    // Poisson(n*t) concentrates tightly: mean 5120, sd ~72.
    let expected = 256.0 * 20.0;
    if !dense.absorbed {
        let got = dense.events_processed as f64;
        assert!(
            (got - expected).abs() < 5.0 * expected.sqrt(),
            "uniform-clock event count {got} far from {expected}"
        );
    }
}
