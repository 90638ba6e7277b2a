//! Experiment configuration: a flat `key = value` file format.
//!
//! `#` starts a comment (whole-line or trailing). Keys are fixed
//! vocabulary — an unknown or repeated key is a parse error with its line
//! number, so typos fail loudly instead of silently running defaults.
//! The experiment mode may be given in the file, on the command line, or
//! both (in which case they must agree).

use crate::error::{HarnessError, Result};
use latgame_core::lattice::{GameParams, LatticeGeometry, PayoffMatrix};
use std::collections::HashMap;
use std::path::PathBuf;

/// What the harness should run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    /// Replicated stochastic runs with density series and checkpoints.
    Simulate,
    /// Block reduction and deterministic closure of sampled fields.
    Reduce,
    /// Built-in verification suite over replicated runs.
    Verify,
    /// Snapshot gallery and outcome classification on a planar lattice.
    #[value(name = "figure1")]
    Figure1,
    /// Coupled growth-process domination check.
    Richardson,
    /// Well-mixed trajectories, regime table, and integrator agreement.
    Meanfield,
    /// Threshold-growth sweep over coarse lattice sizes and densities.
    Bootstrap,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Simulate => "simulate",
            Mode::Reduce => "reduce",
            Mode::Verify => "verify",
            Mode::Figure1 => "figure1",
            Mode::Richardson => "richardson",
            Mode::Meanfield => "meanfield",
            Mode::Bootstrap => "bootstrap",
        }
    }

    pub fn parse_name(name: &str) -> Option<Mode> {
        Some(match name {
            "simulate" => Mode::Simulate,
            "reduce" => Mode::Reduce,
            "verify" => Mode::Verify,
            "figure1" => Mode::Figure1,
            "richardson" => Mode::Richardson,
            "meanfield" => Mode::Meanfield,
            "bootstrap" => Mode::Bootstrap,
            _ => return None,
        })
    }
}

/// Which event scheduler drives stochastic runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Sites that would flip, scheduled at rate `|active|`.
    Active,
    /// Every site at rate 1, satisfied sites doing nothing.
    Dense,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Active => "active",
            Scheme::Dense => "dense",
        }
    }
}

/// Parsed experiment description. Presence requirements depend on the
/// mode and are checked by [`ExperimentConfig::validate_for_mode`].
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub mode: Option<Mode>,
    pub d: Option<usize>,
    pub sides: Option<Vec<usize>>,
    pub params: Option<GameParams>,
    pub p: Option<f64>,
    pub t_max: Option<f64>,
    pub record_every: Option<f64>,
    pub seeds: u64,
    pub master_seed: Option<u64>,
    pub snapshot_every: Option<f64>,
    pub output_dir: Option<PathBuf>,
    pub workers: usize,
    pub m: Option<usize>,
    pub l_values: Option<Vec<usize>>,
    pub q_values: Option<Vec<f64>>,
    pub u0: Option<f64>,
    pub dt: f64,
    pub scheme: Scheme,
    pub final_checkpoints: bool,
}

const KNOWN_KEYS: &[&str] = &[
    "mode",
    "d",
    "sides",
    "a1",
    "a2",
    "a11",
    "a12",
    "a21",
    "a22",
    "p",
    "t_max",
    "record_every",
    "seeds",
    "master_seed",
    "snapshot_every",
    "output_dir",
    "workers",
    "m",
    "l_values",
    "q_values",
    "u0",
    "dt",
    "scheme",
    "final_checkpoints",
];

/// Raw `key -> (line, value)` map with vocabulary and duplicate checks.
fn raw_entries(text: &str) -> Result<HashMap<String, (usize, String)>> {
    let mut entries = HashMap::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or(HarnessError::Parse {
            line,
            message: format!("expected `key = value`, got `{content}`"),
        })?;
        let key = key.trim();
        let value = value.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(HarnessError::Parse {
                line,
                message: format!("unknown key `{key}`"),
            });
        }
        if value.is_empty() {
            return Err(HarnessError::Parse {
                line,
                message: format!("key `{key}` has no value"),
            });
        }
        if entries.insert(key.to_string(), (line, value.to_string())).is_some() {
            return Err(HarnessError::Parse {
                line,
                message: format!("key `{key}` given more than once"),
            });
        }
    }
    Ok(entries)
}

struct Entries(HashMap<String, (usize, String)>);

impl Entries {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.0.remove(key)
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some((line, value)) => value.parse::<T>().map(Some).map_err(|_| HarnessError::Parse {
                line,
                message: format!(
                    "could not parse `{value}` as a {} for key `{key}`",
                    std::any::type_name::<T>()
                ),
            }),
        }
    }

    fn parse_list<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<Vec<T>>> {
        match self.take(key) {
            None => Ok(None),
            Some((line, value)) => value
                .split(',')
                .map(|item| {
                    item.trim().parse::<T>().map_err(|_| HarnessError::Parse {
                        line,
                        message: format!("could not parse `{}` in list key `{key}`", item.trim()),
                    })
                })
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }
}

fn config_err(message: impl Into<String>) -> HarnessError {
    HarnessError::Config(message.into())
}

fn check_unit_interval(value: f64, key: &str) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(config_err(format!(
            "`{key}` must lie in [0, 1], got {value}"
        )))
    }
}

fn check_positive(value: f64, key: &str) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(config_err(format!(
            "`{key}` must be finite and positive, got {value}"
        )))
    }
}

/// Parse a config file's text into a validated [`ExperimentConfig`].
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut entries = Entries(raw_entries(text)?);

    let mode = match entries.take("mode") {
        None => None,
        Some((line, value)) => Some(Mode::parse_name(&value).ok_or(HarnessError::Parse {
            line,
            message: format!("unknown mode `{value}`"),
        })?),
    };

    let scheme = match entries.take("scheme") {
        None => Scheme::Active,
        Some((line, value)) => match value.as_str() {
            "active" => Scheme::Active,
            "dense" => Scheme::Dense,
            other => {
                return Err(HarnessError::Parse {
                    line,
                    message: format!("scheme must be `active` or `dense`, got `{other}`"),
                })
            }
        },
    };

    let a1 = entries.parse::<f64>("a1")?;
    let a2 = entries.parse::<f64>("a2")?;
    let matrix: Vec<Option<f64>> = ["a11", "a12", "a21", "a22"]
        .iter()
        .map(|k| entries.parse::<f64>(k))
        .collect::<Result<_>>()?;
    let params = resolve_params(a1, a2, &matrix)?;

    let sides_line = entries.0.get("sides").map(|(line, _)| *line);
    let sides = entries.parse_list::<usize>("sides")?;
    if let Some(sides) = &sides {
        // Surface geometry problems (odd or tiny sides) at parse time,
        // attributed to the config line that named them.
        LatticeGeometry::new(sides).map_err(|e| HarnessError::Parse {
            line: sides_line.unwrap_or(0),
            message: e.to_string(),
        })?;
    }
    let d = entries.parse::<usize>("d")?;
    if let (Some(d), Some(sides)) = (d, &sides) {
        if d != sides.len() {
            return Err(config_err(format!(
                "`d` = {d} contradicts `sides` with {} entries",
                sides.len()
            )));
        }
    }
    if d == Some(0) {
        return Err(config_err("`d` must be at least 1"));
    }

    let p = entries
        .parse::<f64>("p")?
        .map(|v| check_unit_interval(v, "p"))
        .transpose()?;
    let t_max = entries
        .parse::<f64>("t_max")?
        .map(|v| check_positive(v, "t_max"))
        .transpose()?;
    let record_every = entries
        .parse::<f64>("record_every")?
        .map(|v| check_positive(v, "record_every"))
        .transpose()?;
    let snapshot_every = entries
        .parse::<f64>("snapshot_every")?
        .map(|v| check_positive(v, "snapshot_every"))
        .transpose()?;
    let u0 = entries
        .parse::<f64>("u0")?
        .map(|v| check_unit_interval(v, "u0"))
        .transpose()?;
    let dt = entries
        .parse::<f64>("dt")?
        .map(|v| check_positive(v, "dt"))
        .transpose()?
        .unwrap_or(1e-3);

    let seeds = entries.parse::<u64>("seeds")?.unwrap_or(1);
    if seeds == 0 {
        return Err(config_err("`seeds` must be at least 1"));
    }
    let workers = entries.parse::<usize>("workers")?.unwrap_or(1);
    if workers == 0 {
        return Err(config_err("`workers` must be at least 1"));
    }
    let master_seed = entries.parse::<u64>("master_seed")?;
    let m = entries.parse::<usize>("m")?;
    if m == Some(0) {
        return Err(config_err("`m` must be at least 1"));
    }
    let l_values = entries.parse_list::<usize>("l_values")?;
    if let Some(ls) = &l_values {
        if ls.is_empty() || ls.iter().any(|&l| l < 2) {
            return Err(config_err("`l_values` entries must all be at least 2"));
        }
    }
    let q_values = entries.parse_list::<f64>("q_values")?;
    if let Some(qs) = &q_values {
        for &q in qs {
            check_unit_interval(q, "q_values")?;
        }
    }
    let output_dir = entries.take("output_dir").map(|(_, v)| PathBuf::from(v));
    let final_checkpoints = match entries.take("final_checkpoints") {
        None => true,
        Some((line, value)) => match value.as_str() {
            "true" => true,
            "false" => false,
            other => {
                return Err(HarnessError::Parse {
                    line,
                    message: format!("final_checkpoints must be `true` or `false`, got `{other}`"),
                })
            }
        },
    };

    debug_assert!(entries.0.is_empty(), "all known keys should be consumed");

    Ok(ExperimentConfig {
        mode,
        d,
        sides,
        params,
        p,
        t_max,
        record_every,
        seeds,
        master_seed,
        snapshot_every,
        output_dir,
        workers,
        m,
        l_values,
        q_values,
        u0,
        dt,
        scheme,
        final_checkpoints,
    })
}

fn resolve_params(
    a1: Option<f64>,
    a2: Option<f64>,
    matrix: &[Option<f64>],
) -> Result<Option<GameParams>> {
    let reduced_given = a1.is_some() || a2.is_some();
    let matrix_given = matrix.iter().any(Option::is_some);
    if reduced_given && matrix_given {
        return Err(config_err(
            "give either `a1`/`a2` or the full payoff matrix `a11`..`a22`, not both",
        ));
    }
    if reduced_given {
        let (a1, a2) = match (a1, a2) {
            (Some(a1), Some(a2)) => (a1, a2),
            _ => return Err(config_err("`a1` and `a2` must be given together")),
        };
        return GameParams::new(a1, a2)
            .map(Some)
            .map_err(HarnessError::Core);
    }
    if matrix_given {
        let values: Option<Vec<f64>> = matrix.iter().copied().collect();
        let values = values.ok_or_else(|| {
            config_err("the payoff matrix needs all four of `a11`, `a12`, `a21`, `a22`")
        })?;
        let matrix =
            PayoffMatrix::new(values[0], values[1], values[2], values[3]).map_err(HarnessError::Core)?;
        return Ok(Some(GameParams::from_matrix(&matrix)));
    }
    Ok(None)
}

/// Read and parse a config file.
pub fn load_config(path: &std::path::Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(HarnessError::io(path))?;
    parse_config(&text)
}

impl ExperimentConfig {
    /// Block reductions tile the lattice with aligned side-2 blocks, so
    /// every side must be even and at least 4.
    fn check_block_compatible_sides(&self, mode: Mode) -> Result<()> {
        if let Some(sides) = &self.sides {
            if sides.iter().any(|&s| s % 2 != 0 || s < 4) {
                return Err(config_err(format!(
                    "mode `{}` needs even sides of at least 4, got {sides:?}",
                    mode.name()
                )));
            }
        }
        Ok(())
    }

    /// Check that every key this mode needs is present (and that
    /// mode-specific shape constraints hold).
    pub fn validate_for_mode(&self, mode: Mode) -> Result<()> {
        let need = |present: bool, what: &str| {
            if present {
                Ok(())
            } else {
                Err(config_err(format!(
                    "mode `{}` requires `{what}`",
                    mode.name()
                )))
            }
        };
        let has_params = self.params.is_some();
        match mode {
            Mode::Simulate => {
                need(self.sides.is_some(), "sides")?;
                need(has_params, "a1/a2 (or a11..a22)")?;
                need(self.p.is_some(), "p")?;
                need(self.t_max.is_some(), "t_max")?;
                need(self.master_seed.is_some(), "master_seed")?;
                if self.snapshot_every.is_some() {
                    let d = self.sides.as_ref().map_or(0, Vec::len);
                    if d != 2 {
                        return Err(HarnessError::UnsupportedDimension(d));
                    }
                }
            }
            Mode::Reduce => {
                need(self.sides.is_some(), "sides")?;
                need(has_params, "a1/a2 (or a11..a22)")?;
                need(self.p.is_some(), "p")?;
                need(self.master_seed.is_some(), "master_seed")?;
                self.check_block_compatible_sides(mode)?;
            }
            Mode::Verify => {
                need(self.sides.is_some(), "sides")?;
                need(has_params, "a1/a2 (or a11..a22)")?;
                need(self.p.is_some(), "p")?;
                need(self.t_max.is_some(), "t_max")?;
                need(self.master_seed.is_some(), "master_seed")?;
                self.check_block_compatible_sides(mode)?;
            }
            Mode::Figure1 => {
                need(self.sides.is_some(), "sides")?;
                need(has_params, "a1/a2 (or a11..a22)")?;
                need(self.t_max.is_some(), "t_max")?;
                need(self.master_seed.is_some(), "master_seed")?;
                let d = self.sides.as_ref().map_or(0, Vec::len);
                if d != 2 {
                    return Err(HarnessError::UnsupportedDimension(d));
                }
            }
            Mode::Richardson => {
                need(self.sides.is_some(), "sides")?;
                need(has_params, "a1/a2 (or a11..a22)")?;
                need(self.p.is_some(), "p")?;
                need(self.t_max.is_some(), "t_max")?;
                need(self.master_seed.is_some(), "master_seed")?;
            }
            Mode::Meanfield => {
                need(has_params, "a1/a2 (or a11..a22)")?;
            }
            Mode::Bootstrap => {
                need(self.d.is_some(), "d")?;
                need(self.l_values.is_some(), "l_values")?;
                need(self.q_values.is_some(), "q_values")?;
                need(self.master_seed.is_some(), "master_seed")?;
                let d = self.d.unwrap_or(0);
                if let Some(m) = self.m {
                    if m > 2 * d {
                        return Err(config_err(format!(
                            "`m` = {m} exceeds the neighbour count {} in dimension {d}",
                            2 * d
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_simulate_config_parses() {
        let text = "\
# stochastic run
mode = simulate
sides = 32, 32   # torus shape
a1 = 1.01
a2 = 1
p = 0.3
t_max = 200
seeds = 25
master_seed = 7
workers = 4
scheme = dense
final_checkpoints = false
";
        let config = parse_config(text).unwrap();
        assert_eq!(config.mode, Some(Mode::Simulate));
        assert_eq!(config.sides.as_deref(), Some(&[32, 32][..]));
        let params = config.params.unwrap();
        assert_eq!((params.a1(), params.a2()), (1.01, 1.0));
        assert_eq!(config.p, Some(0.3));
        assert_eq!(config.t_max, Some(200.0));
        assert_eq!(config.seeds, 25);
        assert_eq!(config.master_seed, Some(7));
        assert_eq!(config.workers, 4);
        assert_eq!(config.scheme, Scheme::Dense);
        assert!(!config.final_checkpoints);
        config.validate_for_mode(Mode::Simulate).unwrap();
    }

    #[test]
    fn defaults_apply_when_keys_are_absent() {
        let config = parse_config("a1 = 1\na2 = -1\n").unwrap();
        assert_eq!(config.mode, None);
        assert_eq!(config.seeds, 1);
        assert_eq!(config.workers, 1);
        assert_eq!(config.dt, 1e-3);
        assert_eq!(config.scheme, Scheme::Active);
        assert!(config.final_checkpoints);
    }

    #[test]
    fn unknown_and_duplicate_keys_report_their_line() {
        let err = parse_config("a1 = 1\nbogus = 2\n").unwrap_err();
        match err {
            HarnessError::Parse { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("bogus"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        let err = parse_config("p = 0.5\n\np = 0.6\n").unwrap_err();
        match err {
            HarnessError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_lines_and_values_are_rejected() {
        assert!(matches!(
            parse_config("just words\n"),
            Err(HarnessError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_config("p =\n"),
            Err(HarnessError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_config("p = abc\n"),
            Err(HarnessError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_config("mode = dance\n"),
            Err(HarnessError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_config("scheme = eager\n"),
            Err(HarnessError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_config("final_checkpoints = yes\n"),
            Err(HarnessError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn range_violations_are_config_errors() {
        assert!(parse_config("p = 1.5\n").is_err());
        assert!(parse_config("t_max = 0\n").is_err());
        assert!(parse_config("t_max = -3\n").is_err());
        assert!(parse_config("seeds = 0\n").is_err());
        assert!(parse_config("workers = 0\n").is_err());
        assert!(parse_config("dt = 0\n").is_err());
        assert!(parse_config("q_values = 0.3, 1.2\n").is_err());
        assert!(parse_config("l_values = 16, 1\n").is_err());
        assert!(parse_config("m = 0\n").is_err());
    }

    #[test]
    fn geometry_problems_surface_at_parse_time() {
        assert!(parse_config("sides = 5, 6\n").is_err());
        assert!(parse_config("sides = 2, 8\n").is_err());
        assert!(parse_config("sides = 8, 8\n").is_ok());
        assert!(parse_config("d = 3\nsides = 8, 8\n").is_err());
        assert!(parse_config("d = 2\nsides = 8, 8\n").is_ok());
    }

    #[test]
    fn payoff_matrix_reduces_and_conflicts_are_rejected() {
        let config = parse_config("a11 = 3\na12 = 1\na21 = 2\na22 = 5\n").unwrap();
        let params = config.params.unwrap();
        assert_eq!((params.a1(), params.a2()), (1.0, 4.0));
        assert!(parse_config("a11 = 3\na12 = 1\n").is_err());
        assert!(parse_config("a1 = 1\n").is_err());
        assert!(parse_config("a1 = 1\na2 = 2\na11 = 1\na12 = 0\na21 = 0\na22 = 1\n").is_err());
    }

    #[test]
    fn per_mode_requirements_are_enforced() {
        let minimal = parse_config("a1 = 1.01\na2 = 1\n").unwrap();
        assert!(minimal.validate_for_mode(Mode::Meanfield).is_ok());
        assert!(minimal.validate_for_mode(Mode::Simulate).is_err());
        assert!(minimal.validate_for_mode(Mode::Bootstrap).is_err());

        let figure_bad = parse_config(
            "sides = 8, 8, 8\na1 = 1.01\na2 = 1\nt_max = 30\nmaster_seed = 1\n",
        )
        .unwrap();
        assert!(matches!(
            figure_bad.validate_for_mode(Mode::Figure1),
            Err(HarnessError::UnsupportedDimension(3))
        ));

        let snap_bad = parse_config(
            "sides = 16\na1 = 2\na2 = 1\np = 0.1\nt_max = 10\nmaster_seed = 1\nsnapshot_every = 5\n",
        )
        .unwrap();
        assert!(matches!(
            snap_bad.validate_for_mode(Mode::Simulate),
            Err(HarnessError::UnsupportedDimension(1))
        ));

        let boot = parse_config(
            "d = 2\nl_values = 16, 32\nq_values = 0.1, 0.2\nmaster_seed = 3\nm = 5\n",
        )
        .unwrap();
        assert!(boot.validate_for_mode(Mode::Bootstrap).is_err());
        let boot_ok = parse_config(
            "d = 2\nl_values = 16, 32\nq_values = 0.1, 0.2\nmaster_seed = 3\nm = 2\n",
        )
        .unwrap();
        assert!(boot_ok.validate_for_mode(Mode::Bootstrap).is_ok());
    }

    #[test]
    fn mode_names_round_trip() {
        for mode in [
            Mode::Simulate,
            Mode::Reduce,
            Mode::Verify,
            Mode::Figure1,
            Mode::Richardson,
            Mode::Meanfield,
            Mode::Bootstrap,
        ] {
            assert_eq!(Mode::parse_name(mode.name()), Some(mode));
        }
        assert_eq!(Mode::parse_name("unknown"), None);
    }
}
