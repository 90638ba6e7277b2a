//! Mode dispatch: resolve a parsed config into concrete runs, write the
//! artifacts, and report summary lines.
//!
//! Replicas run in parallel on a worker pool, but every artifact byte is
//! written sequentially in replica order from deterministic inputs, so a
//! rerun with the same config and master seed — at any worker count —
//! reproduces the outputs exactly.

use latgame_core::dynamics::{
    check_richardson_domination, derive_seed, richardson_init, simulate, simulate_active_set,
    RunReport,
};
use latgame_core::lattice::{GameParams, LatticeGeometry, StrategyField};
use latgame_core::meanfield::{
    classify_regime, exact_trajectory, integrate_numeric, long_time_limit, threshold, Regime,
};
use latgame_core::reductions::{hypercubic_view, response_closure_with_depth, sparse_reduce};
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::config::{ExperimentConfig, Mode, Scheme};
use crate::error::{HarnessError, Result};
use crate::figure1::{density_panel, DensityPanel, FigureSettings, DEFAULT_DENSITIES};
use crate::io::ManifestWriter;
use crate::snapshots::SnapshotSchedule;
use crate::verify::{verify_suite, VerifySettings};
use crate::{config_value, io};

/// A config bound to a mode and an output directory, ready to run.
#[derive(Debug, Clone)]
pub struct ResolvedRun {
    pub mode: Mode,
    pub config: ExperimentConfig,
    pub output_dir: PathBuf,
}

/// What the caller prints and how the process should exit.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub lines: Vec<String>,
    /// A verification item failed: exit 2 rather than an error.
    pub verify_failed: bool,
    pub manifest_path: Option<PathBuf>,
}

/// Run the experiment described by `run`, writing artifacts under its
/// output directory.
pub fn run_experiment(run: &ResolvedRun) -> Result<RunSummary> {
    run.config.validate_for_mode(run.mode)?;
    std::fs::create_dir_all(&run.output_dir)
        .map_err(HarnessError::io(&run.output_dir))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(run.config.workers)
        .build()
        .map_err(|e| HarnessError::Config(format!("could not start worker pool: {e}")))?;
    pool.install(|| match run.mode {
        Mode::Simulate => run_simulate(run),
        Mode::Reduce => run_reduce(run),
        Mode::Verify => run_verify(run),
        Mode::Figure1 => run_figure1(run),
        Mode::Richardson => run_richardson(run),
        Mode::Meanfield => run_meanfield(run),
        Mode::Bootstrap => run_bootstrap(run),
    })
}

fn sides_label(sides: &[usize]) -> String {
    sides
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("x")
}

fn run_one(
    initial: &StrategyField,
    params: &GameParams,
    t_max: f64,
    seed: u64,
    record_every: f64,
    scheme: Scheme,
) -> RunReport {
    match scheme {
        Scheme::Active => simulate_active_set(initial, params, t_max, seed, record_every),
        Scheme::Dense => simulate(initial, params, t_max, seed, record_every),
    }
}

fn run_simulate(run: &ResolvedRun) -> Result<RunSummary> {
    let cfg = &run.config;
    let sides = config_value(&cfg.sides, "sides")?;
    let params = config_value(&cfg.params, "params")?;
    let p = config_value(&cfg.p, "p")?;
    let t_max = config_value(&cfg.t_max, "t_max")?;
    let master = config_value(&cfg.master_seed, "master_seed")?;
    let record_every = cfg.record_every.unwrap_or(t_max / 40.0);
    let geometry = LatticeGeometry::new(&sides)?;

    struct Replica {
        report: RunReport,
        snapshots: Option<Vec<(f64, StrategyField)>>,
    }
    let replicas: Vec<Replica> = (0..cfg.seeds)
        .into_par_iter()
        .map(|r| -> Result<Replica> {
            let field = StrategyField::random(&geometry, p, derive_seed(master, 2 * r))?;
            let stream_seed = derive_seed(master, 2 * r + 1);
            if r == 0 {
                if let Some(step) = cfg.snapshot_every {
                    let mut schedule = SnapshotSchedule::every(step, t_max);
                    let report = match cfg.scheme {
                        Scheme::Active => latgame_core::dynamics::simulate_active_set_observed(
                            &field,
                            &params,
                            t_max,
                            stream_seed,
                            record_every,
                            &mut schedule,
                        ),
                        Scheme::Dense => latgame_core::dynamics::simulate_observed(
                            &field,
                            &params,
                            t_max,
                            stream_seed,
                            record_every,
                            &mut schedule,
                        ),
                    };
                    let snapshots = schedule.finish(&report.final_field);
                    return Ok(Replica {
                        report,
                        snapshots: Some(snapshots),
                    });
                }
            }
            Ok(Replica {
                report: run_one(&field, &params, t_max, stream_seed, record_every, cfg.scheme),
                snapshots: None,
            })
        })
        .collect::<Result<_>>()?;

    let mut manifest = ManifestWriter::new(&run.output_dir, run.mode.name());
    manifest.meta("sides", sides_label(&sides));
    manifest.meta("a1", params.a1());
    manifest.meta("a2", params.a2());
    manifest.meta("p", p);
    manifest.meta("t_max", t_max);
    manifest.meta("record_every", record_every);
    manifest.meta("scheme", cfg.scheme.name());
    manifest.meta("seeds", cfg.seeds);
    manifest.meta("master_seed", master);

    for (r, replica) in replicas.iter().enumerate() {
        let r64 = r as u64;
        manifest.meta(
            &format!("seeds_r{r:03}"),
            format!(
                "field:{} stream:{}",
                derive_seed(master, 2 * r64),
                derive_seed(master, 2 * r64 + 1)
            ),
        );
        manifest.meta(
            &format!("absorption_time_r{r:03}"),
            match replica.report.series.last() {
                Some(sample) if replica.report.absorbed => sample.time.to_string(),
                _ => "none".to_string(),
            },
        );
        manifest.write_file(
            &format!("run_{r:03}.csv"),
            io::density_csv(&replica.report.series).as_bytes(),
        )?;
        if cfg.final_checkpoints {
            manifest.write_file(
                &format!("final_{r:03}.rle"),
                io::checkpoint_string(&replica.report.final_field).as_bytes(),
            )?;
        }
        if let Some(snapshots) = &replica.snapshots {
            for (t, field) in snapshots {
                manifest.write_file(&format!("snap_t{t}.pgm"), &io::pgm_bytes(field)?)?;
            }
        }
    }
    let all_series: Vec<_> = replicas.iter().map(|r| r.report.series.clone()).collect();
    manifest.write_file("aggregate.csv", io::aggregate_csv(&all_series).as_bytes())?;

    let absorbed = replicas.iter().filter(|r| r.report.absorbed).count();
    let mean_final = replicas
        .iter()
        .map(|r| r.report.final_field.density_one())
        .sum::<f64>()
        / cfg.seeds as f64;
    let manifest_path = manifest.finish()?;
    Ok(RunSummary {
        lines: vec![
            format!("simulate: {} replicas on {}", cfg.seeds, sides_label(&sides)),
            format!("absorbed: {absorbed}/{}", cfg.seeds),
            format!("mean final density1: {mean_final:.6}"),
            format!("manifest: {}", manifest_path.display()),
        ],
        verify_failed: false,
        manifest_path: Some(manifest_path),
    })
}

fn run_reduce(run: &ResolvedRun) -> Result<RunSummary> {
    let cfg = &run.config;
    let sides = config_value(&cfg.sides, "sides")?;
    let params = config_value(&cfg.params, "params")?;
    let p = config_value(&cfg.p, "p")?;
    let master = config_value(&cfg.master_seed, "master_seed")?;
    if !(params.a1() > params.a2() && params.a2() > 0.0) {
        return Err(HarnessError::Config(format!(
            "reduce mode studies expanding block unions and needs a1 > a2 > 0, got a1={}, a2={}",
            params.a1(),
            params.a2()
        )));
    }
    let geometry = LatticeGeometry::new(&sides)?;

    struct Row {
        ones_initial: usize,
        ones_reduced: usize,
        blocks: usize,
        depth: usize,
        ones_closure: usize,
        fields: Option<(StrategyField, StrategyField, StrategyField)>,
    }
    let rows: Vec<Row> = (0..cfg.seeds)
        .into_par_iter()
        .map(|r| -> Result<Row> {
            let field = StrategyField::random(&geometry, p, derive_seed(master, r))?;
            let reduced = sparse_reduce(&field);
            let blocks = hypercubic_view(&field).occupied_count();
            let (closure, depth) = response_closure_with_depth(&reduced, &params)?;
            Ok(Row {
                ones_initial: field.count_one(),
                ones_reduced: reduced.count_one(),
                blocks,
                depth,
                ones_closure: closure.count_one(),
                fields: (r == 0).then(|| (field, reduced, closure)),
            })
        })
        .collect::<Result<_>>()?;

    let mut manifest = ManifestWriter::new(&run.output_dir, run.mode.name());
    manifest.meta("sides", sides_label(&sides));
    manifest.meta("a1", params.a1());
    manifest.meta("a2", params.a2());
    manifest.meta("p", p);
    manifest.meta("seeds", cfg.seeds);
    manifest.meta("master_seed", master);
    for r in 0..cfg.seeds {
        manifest.meta(
            &format!("seeds_r{r:03}"),
            format!("field:{}", derive_seed(master, r)),
        );
    }

    let mut csv = String::from("seed,ones_initial,ones_reduced,blocks_occupied,closure_depth,ones_closure\n");
    for (r, row) in rows.iter().enumerate() {
        writeln!(
            csv,
            "{r},{},{},{},{},{}",
            row.ones_initial, row.ones_reduced, row.blocks, row.depth, row.ones_closure
        )
        .expect("string write");
    }
    manifest.write_file("reduce.csv", csv.as_bytes())?;
    if geometry.dimension() == 2 {
        if let Some((field, reduced, closure)) = rows.first().and_then(|r| r.fields.as_ref()) {
            manifest.write_file("initial.pgm", &io::pgm_bytes(field)?)?;
            manifest.write_file("reduced.pgm", &io::pgm_bytes(reduced)?)?;
            manifest.write_file("closure.pgm", &io::pgm_bytes(closure)?)?;
        }
    }
    let mean_depth =
        rows.iter().map(|r| r.depth).sum::<usize>() as f64 / cfg.seeds.max(1) as f64;
    let manifest_path = manifest.finish()?;
    Ok(RunSummary {
        lines: vec![
            format!("reduce: {} replicas on {}", cfg.seeds, sides_label(&sides)),
            format!("mean closure depth: {mean_depth:.2}"),
            format!("manifest: {}", manifest_path.display()),
        ],
        verify_failed: false,
        manifest_path: Some(manifest_path),
    })
}

fn run_verify(run: &ResolvedRun) -> Result<RunSummary> {
    let cfg = &run.config;
    let settings = VerifySettings {
        sides: config_value(&cfg.sides, "sides")?,
        params: config_value(&cfg.params, "params")?,
        p: config_value(&cfg.p, "p")?,
        t_max: config_value(&cfg.t_max, "t_max")?,
        seeds: cfg.seeds,
        master_seed: config_value(&cfg.master_seed, "master_seed")?,
        record_every: cfg.record_every,
    };
    let outcome = verify_suite(&settings)?;

    let mut manifest = ManifestWriter::new(&run.output_dir, run.mode.name());
    manifest.meta("sides", sides_label(&settings.sides));
    manifest.meta("a1", settings.params.a1());
    manifest.meta("a2", settings.params.a2());
    manifest.meta("p", settings.p);
    manifest.meta("t_max", settings.t_max);
    manifest.meta("seeds", settings.seeds);
    manifest.meta("master_seed", settings.master_seed);
    for r in 0..settings.seeds {
        manifest.meta(
            &format!("seeds_r{r:03}"),
            format!("base:{}", derive_seed(settings.master_seed, r)),
        );
    }

    let mut lines: Vec<String> = outcome.items.iter().map(|i| i.line()).collect();
    let mut report = lines.join("\n");
    report.push('\n');
    manifest.write_file("verify.txt", report.as_bytes())?;
    let manifest_path = manifest.finish()?;
    let failed = outcome.failed();
    lines.push(format!(
        "verification: {}",
        if failed { "FAILED" } else { "passed" }
    ));
    lines.push(format!("manifest: {}", manifest_path.display()));
    Ok(RunSummary {
        lines,
        verify_failed: failed,
        manifest_path: Some(manifest_path),
    })
}

fn run_figure1(run: &ResolvedRun) -> Result<RunSummary> {
    let cfg = &run.config;
    let densities: Vec<f64> = match cfg.p {
        Some(p) => vec![p],
        None => DEFAULT_DENSITIES.to_vec(),
    };
    let settings = FigureSettings {
        sides: config_value(&cfg.sides, "sides")?,
        params: config_value(&cfg.params, "params")?,
        densities: densities.clone(),
        t_max: config_value(&cfg.t_max, "t_max")?,
        master_seed: config_value(&cfg.master_seed, "master_seed")?,
        scheme: cfg.scheme,
        record_every: cfg.record_every,
    };

    let panels: Vec<DensityPanel> = densities
        .par_iter()
        .enumerate()
        .map(|(i, &p)| density_panel(&settings, i, p))
        .collect::<Result<_>>()?;

    let mut manifest = ManifestWriter::new(&run.output_dir, run.mode.name());
    manifest.meta("sides", sides_label(&settings.sides));
    manifest.meta("a1", settings.params.a1());
    manifest.meta("a2", settings.params.a2());
    manifest.meta("t_max", settings.t_max);
    manifest.meta("scheme", cfg.scheme.name());
    manifest.meta("master_seed", settings.master_seed);
    manifest.meta(
        "densities",
        densities
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(","),
    );
    for (i, panel) in panels.iter().enumerate() {
        let i64v = i as u64;
        manifest.meta(
            &format!("seeds_p{}", panel.p),
            format!(
                "field:{} stream:{}",
                derive_seed(settings.master_seed, 2 * i64v),
                derive_seed(settings.master_seed, 2 * i64v + 1)
            ),
        );
    }

    let mut summary = String::from("p,final_density,absorbed,outcome,still_growing\n");
    let mut lines = Vec::new();
    for panel in &panels {
        let dir = format!("p{}", panel.p);
        for (t, field) in &panel.snapshots {
            manifest.write_file(&format!("{dir}/snap_t{t}.pgm"), &io::pgm_bytes(field)?)?;
        }
        manifest.write_file(
            &format!("{dir}/final.pgm"),
            &io::pgm_bytes(&panel.final_field)?,
        )?;
        manifest.write_file(
            &format!("{dir}/series.csv"),
            io::density_csv(&panel.series).as_bytes(),
        )?;
        writeln!(
            summary,
            "{},{},{},{},{}",
            panel.p, panel.final_density, panel.absorbed, panel.outcome, panel.still_growing
        )
        .expect("string write");
        lines.push(format!(
            "p={}: {} (final density {:.4}{})",
            panel.p,
            panel.outcome,
            panel.final_density,
            if panel.still_growing {
                ", still growing"
            } else {
                ""
            }
        ));
    }
    manifest.write_file("summary.csv", summary.as_bytes())?;
    let manifest_path = manifest.finish()?;
    lines.push(format!("manifest: {}", manifest_path.display()));
    Ok(RunSummary {
        lines,
        verify_failed: false,
        manifest_path: Some(manifest_path),
    })
}

fn run_richardson(run: &ResolvedRun) -> Result<RunSummary> {
    let cfg = &run.config;
    let sides = config_value(&cfg.sides, "sides")?;
    let params: GameParams = config_value(&cfg.params, "params")?;
    let p = config_value(&cfg.p, "p")?;
    let t_max = config_value(&cfg.t_max, "t_max")?;
    let master = config_value(&cfg.master_seed, "master_seed")?;
    let geometry = LatticeGeometry::new(&sides)?;
    let degree = geometry.neighbor_count() as f64;
    if !(params.a2() > 0.0 && params.a1() > (degree - 1.0) * params.a2()) {
        return Err(HarnessError::Config(format!(
            "richardson mode needs a1 > {}*a2 > 0 in dimension {}, got a1={}, a2={}",
            degree - 1.0,
            geometry.dimension(),
            params.a1(),
            params.a2()
        )));
    }

    struct Row {
        seeded: bool,
        violations: u64,
        events: u64,
        time_all_one: Option<f64>,
        final_density: f64,
        infected_fraction: f64,
    }
    let rows: Vec<Row> = (0..cfg.seeds)
        .into_par_iter()
        .map(|r| -> Result<Row> {
            let field = StrategyField::random(&geometry, p, derive_seed(master, 2 * r))?;
            let seeded = !richardson_init(&field).is_empty();
            let report =
                check_richardson_domination(&field, &params, t_max, derive_seed(master, 2 * r + 1))?;
            Ok(Row {
                seeded,
                violations: report.violations,
                events: report.events_processed,
                time_all_one: report.time_all_one,
                final_density: report.final_strategy.density_one(),
                infected_fraction: report.final_infection.infected_fraction(),
            })
        })
        .collect::<Result<_>>()?;

    let mut manifest = ManifestWriter::new(&run.output_dir, run.mode.name());
    manifest.meta("sides", sides_label(&sides));
    manifest.meta("a1", params.a1());
    manifest.meta("a2", params.a2());
    manifest.meta("p", p);
    manifest.meta("t_max", t_max);
    manifest.meta("seeds", cfg.seeds);
    manifest.meta("master_seed", master);
    for r in 0..cfg.seeds {
        manifest.meta(
            &format!("seeds_r{r:03}"),
            format!(
                "field:{} stream:{}",
                derive_seed(master, 2 * r),
                derive_seed(master, 2 * r + 1)
            ),
        );
    }

    let mut csv = String::from(
        "seed,seeded,violations,events,time_all_one,final_density1,infected_fraction\n",
    );
    for (r, row) in rows.iter().enumerate() {
        writeln!(
            csv,
            "{r},{},{},{},{},{},{}",
            row.seeded,
            row.violations,
            row.events,
            row.time_all_one.map_or(String::new(), |t| t.to_string()),
            row.final_density,
            row.infected_fraction
        )
        .expect("string write");
    }
    manifest.write_file("domination.csv", csv.as_bytes())?;
    let total_violations: u64 = rows.iter().map(|r| r.violations).sum();
    let all_one = rows.iter().filter(|r| r.time_all_one.is_some()).count();
    let manifest_path = manifest.finish()?;
    Ok(RunSummary {
        lines: vec![
            format!(
                "richardson: {} replicas on {}",
                cfg.seeds,
                sides_label(&sides)
            ),
            format!("domination violations: {total_violations}"),
            format!("replicas reaching all-1: {all_one}/{}", cfg.seeds),
            format!("manifest: {}", manifest_path.display()),
        ],
        verify_failed: false,
        manifest_path: Some(manifest_path),
    })
}

/// Sign-pattern grid reported by meanfield mode alongside the trajectory
/// table: both magnitude orders for each sign combination.
pub const REGIME_GRID: [(f64, f64); 12] = [
    (1.0, 1.0),
    (1.0, -1.0),
    (-1.0, 1.0),
    (-1.0, -1.0),
    (2.0, 1.0),
    (2.0, -1.0),
    (-2.0, 1.0),
    (-2.0, -1.0),
    (1.0, 2.0),
    (1.0, -2.0),
    (-1.0, 2.0),
    (-1.0, -2.0),
];

fn regime_name(regime: &Regime) -> &'static str {
    match regime {
        Regime::Strategy1Wins => "strategy1-wins",
        Regime::Strategy2Wins => "strategy2-wins",
        Regime::Coexistence { .. } => "coexistence",
        Regime::Bistable { .. } => "bistable",
    }
}

fn run_meanfield(run: &ResolvedRun) -> Result<RunSummary> {
    let cfg = &run.config;
    let params: GameParams = config_value(&cfg.params, "params")?;
    if params.a1() == 0.0 || params.a2() == 0.0 {
        return Err(HarnessError::Config(
            "meanfield mode needs nonzero a1 and a2".into(),
        ));
    }
    let t_max = cfg.t_max.unwrap_or(5.0);
    let dt = cfg.dt;
    let grid = 20usize;

    let starts: Vec<f64> = match cfg.u0 {
        Some(u0) => vec![u0],
        None => (0..grid).map(|k| k as f64 / (grid - 1) as f64).collect(),
    };
    let times: Vec<f64> = (0..grid)
        .map(|k| t_max * k as f64 / (grid - 1) as f64)
        .collect();

    let mut csv = String::from("u0,t,exact,numeric,abs_error\n");
    let mut max_err = 0.0f64;
    for &u0 in &starts {
        for &t in &times {
            let exact = exact_trajectory(&params, u0, t)?;
            let numeric = if t == 0.0 {
                u0
            } else {
                integrate_numeric(&params, u0, t, dt)?
            };
            let err = (exact - numeric).abs();
            max_err = max_err.max(err);
            writeln!(csv, "{u0},{t},{exact},{numeric},{err:e}").expect("string write");
        }
    }

    let mut regimes = String::from(
        "a1,a2,regime,threshold,limit_from_0.25,limit_from_0.75\n",
    );
    for (a1, a2) in REGIME_GRID {
        let pair = GameParams::new(a1, a2)?;
        let regime = classify_regime(&pair)?;
        writeln!(
            regimes,
            "{a1},{a2},{},{},{},{}",
            regime_name(&regime),
            threshold(&pair).map_or(String::new(), |u| u.to_string()),
            long_time_limit(&pair, 0.25)?,
            long_time_limit(&pair, 0.75)?
        )
        .expect("string write");
    }

    let mut manifest = ManifestWriter::new(&run.output_dir, run.mode.name());
    manifest.meta("a1", params.a1());
    manifest.meta("a2", params.a2());
    manifest.meta("t_max", t_max);
    manifest.meta("dt", dt);
    manifest.write_file("trajectory.csv", csv.as_bytes())?;
    manifest.write_file("regimes.csv", regimes.as_bytes())?;
    let manifest_path = manifest.finish()?;

    let regime = classify_regime(&params)?;
    let mut lines = vec![
        format!("meanfield regime: {}", regime_name(&regime)),
        format!("max |exact - numeric| over the table: {max_err:.3e}"),
    ];
    if let Some(u) = threshold(&params) {
        lines.insert(1, format!("threshold density: {u}"));
    }
    lines.push(format!("manifest: {}", manifest_path.display()));
    Ok(RunSummary {
        lines,
        verify_failed: false,
        manifest_path: Some(manifest_path),
    })
}

fn run_bootstrap(run: &ResolvedRun) -> Result<RunSummary> {
    let cfg = &run.config;
    let d = config_value(&cfg.d, "d")?;
    let l_values = config_value(&cfg.l_values, "l_values")?;
    let q_values = config_value(&cfg.q_values, "q_values")?;
    let master = config_value(&cfg.master_seed, "master_seed")?;
    let m = cfg.m.unwrap_or(d);

    let sweep =
        latgame_core::bootstrap::sweep_critical_density(d, &l_values, &q_values, m, cfg.seeds, master)?;

    let mut manifest = ManifestWriter::new(&run.output_dir, run.mode.name());
    manifest.meta("d", d);
    manifest.meta("m", m);
    manifest.meta("seeds", cfg.seeds);
    manifest.meta("master_seed", master);

    let mut csv = String::from("side,q,fraction_full,seeds\n");
    for cell in &sweep.cells {
        writeln!(
            csv,
            "{},{},{},{}",
            cell.side, cell.q, cell.fraction_full, cell.seeds
        )
        .expect("string write");
    }
    manifest.write_file("sweep.csv", csv.as_bytes())?;
    let manifest_path = manifest.finish()?;

    let mut lines = vec![format!(
        "bootstrap sweep: d={d}, m={m}, sides {:?}, {} seeds per cell",
        l_values, cfg.seeds
    )];
    for &side in &l_values {
        let row: Vec<String> = q_values
            .iter()
            .map(|&q| {
                sweep
                    .fraction(side, q)
                    .map_or("?".into(), |f| format!("{f:.3}"))
            })
            .collect();
        lines.push(format!("L={side}: [{}]", row.join(", ")));
    }
    lines.push(format!("manifest: {}", manifest_path.display()));
    Ok(RunSummary {
        lines,
        verify_failed: false,
        manifest_path: Some(manifest_path),
    })
}
