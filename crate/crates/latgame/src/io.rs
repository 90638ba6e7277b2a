//! Artifact formats: PGM snapshots, CSV series, run-length checkpoints,
//! and the hashed output manifest.

use crate::error::{HarnessError, Result};
use latgame_core::dynamics::SeriesSample;
use latgame_core::lattice::{LatticeGeometry, Strategy, StrategyField};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// Binary 8-bit PGM (`P5`) of a planar field: strategy 1 renders black
/// (0), strategy 2 white (255). Image rows follow lattice axis 0 and
/// columns follow axis 1, so the width is `sides[1]` and the height is
/// `sides[0]` — matching the row-major site order exactly.
pub fn pgm_bytes(field: &StrategyField) -> Result<Vec<u8>> {
    let g = field.geometry();
    if g.dimension() != 2 {
        return Err(HarnessError::UnsupportedDimension(g.dimension()));
    }
    let (height, width) = (g.sides()[0], g.sides()[1]);
    let mut bytes = format!("P5\n{width} {height}\n255\n").into_bytes();
    bytes.reserve(g.site_count());
    for index in 0..g.site_count() {
        bytes.push(if field.is_one_at(index) { 0 } else { 255 });
    }
    Ok(bytes)
}

pub fn write_snapshot_pgm(path: &Path, field: &StrategyField) -> Result<()> {
    fs::write(path, pgm_bytes(field)?).map_err(HarnessError::io(path))
}

/// One run's sampled series as CSV: `t,density1,flips,active`, `\n` line
/// endings, floats in Rust's shortest round-trip notation.
pub fn density_csv(series: &[SeriesSample]) -> String {
    let mut out = String::from("t,density1,flips,active\n");
    for s in series {
        let _ = writeln!(out, "{},{},{},{}", s.time, s.density_one, s.flips, s.active);
    }
    out
}

/// All replicas in one CSV with a leading `seed` column holding the
/// replica index.
pub fn aggregate_csv(all: &[Vec<SeriesSample>]) -> String {
    let mut out = String::from("seed,t,density1,flips,active\n");
    for (replica, series) in all.iter().enumerate() {
        for s in series {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                replica, s.time, s.density_one, s.flips, s.active
            );
        }
    }
    out
}

/// Run-length text checkpoint of a strategy field.
///
/// Two lines: `sides` followed by the side lengths, then `data` followed
/// by `count*strategy` tokens covering the sites in row-major order
/// (last axis fastest). Example for a 4x4 field whose first three sites
/// play 2, next one plays 1, rest play 2:
///
/// ```text
/// sides 4 4
/// data 3*2 1*1 12*2
/// ```
pub fn checkpoint_string(field: &StrategyField) -> String {
    let g = field.geometry();
    let mut out = String::from("sides");
    for side in g.sides() {
        let _ = write!(out, " {side}");
    }
    out.push_str("\ndata");
    let mut run_code = 0u8;
    let mut run_len = 0usize;
    for index in 0..g.site_count() {
        let code = if field.is_one_at(index) { 1 } else { 2 };
        if code == run_code {
            run_len += 1;
        } else {
            if run_len > 0 {
                let _ = write!(out, " {run_len}*{run_code}");
            }
            run_code = code;
            run_len = 1;
        }
    }
    if run_len > 0 {
        let _ = write!(out, " {run_len}*{run_code}");
    }
    out.push('\n');
    out
}

/// Parse a checkpoint produced by [`checkpoint_string`], validating the
/// geometry and that the runs cover every site exactly once.
pub fn parse_checkpoint(text: &str) -> Result<StrategyField> {
    let parse_err = |line: usize, message: String| HarnessError::Parse { line, message };
    let mut lines = text.lines();
    let sides_line = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing `sides` line".into()))?;
    let mut sides_parts = sides_line.split_whitespace();
    if sides_parts.next() != Some("sides") {
        return Err(parse_err(1, "checkpoint must start with `sides`".into()));
    }
    let sides: Vec<usize> = sides_parts
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| parse_err(1, format!("bad side length `{tok}`")))
        })
        .collect::<Result<_>>()?;
    let geometry = LatticeGeometry::new(&sides).map_err(HarnessError::Core)?;

    let data_line = lines
        .next()
        .ok_or_else(|| parse_err(2, "missing `data` line".into()))?;
    let mut data_parts = data_line.split_whitespace();
    if data_parts.next() != Some("data") {
        return Err(parse_err(2, "second line must start with `data`".into()));
    }
    let mut field = StrategyField::uniform(&geometry, Strategy::Two);
    let mut cursor = 0usize;
    for token in data_parts {
        let (count, code) = token
            .split_once('*')
            .ok_or_else(|| parse_err(2, format!("bad run token `{token}`")))?;
        let count: usize = count
            .parse()
            .ok()
            .filter(|&c| c > 0)
            .ok_or_else(|| parse_err(2, format!("bad run length in `{token}`")))?;
        let strategy = match code {
            "1" => Strategy::One,
            "2" => Strategy::Two,
            _ => return Err(parse_err(2, format!("bad strategy code in `{token}`"))),
        };
        if cursor + count > geometry.site_count() {
            return Err(parse_err(
                2,
                format!(
                    "runs cover more than the {} sites of the lattice",
                    geometry.site_count()
                ),
            ));
        }
        if strategy == Strategy::One {
            for index in cursor..cursor + count {
                field.set_at(index, Strategy::One);
            }
        }
        cursor += count;
    }
    if cursor != geometry.site_count() {
        return Err(parse_err(
            2,
            format!(
                "runs cover {cursor} sites but the lattice has {}",
                geometry.site_count()
            ),
        ));
    }
    Ok(field)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        let _ = write!(out, "{byte:02x}");
    }
    out
}

/// Collects the artifacts of one run and writes `manifest.txt`: flat
/// `key = value` metadata followed by one `artifact <relpath> = <sha256>`
/// line per file, sorted by path. Everything except the `generated_unix`
/// stamp is a pure function of the experiment inputs.
pub struct ManifestWriter {
    dir: PathBuf,
    meta: Vec<(String, String)>,
    files: Vec<(String, String)>,
}

impl ManifestWriter {
    pub fn new(dir: &Path, mode: &str) -> Self {
        Self {
            dir: dir.to_path_buf(),
            meta: vec![
                ("mode".into(), mode.into()),
                ("engine_version".into(), env!("CARGO_PKG_VERSION").into()),
            ],
            files: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl std::fmt::Display) {
        self.meta.push((key.into(), value.to_string()));
    }

    /// Write a file under the output directory and record its hash.
    /// `relpath` may contain `/` separators; parent directories are
    /// created as needed.
    pub fn write_file(&mut self, relpath: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(relpath);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(HarnessError::io(parent))?;
        }
        fs::write(&path, bytes).map_err(HarnessError::io(&path))?;
        self.files.push((relpath.to_string(), sha256_hex(bytes)));
        Ok(())
    }

    /// Write `manifest.txt` and return its path.
    pub fn finish(mut self) -> Result<PathBuf> {
        let stamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let mut out = String::new();
        for (key, value) in &self.meta {
            let _ = writeln!(out, "{key} = {value}");
        }
        let _ = writeln!(out, "generated_unix = {stamp}");
        self.files.sort();
        for (relpath, sha) in &self.files {
            let _ = writeln!(out, "artifact {relpath} = {sha}");
        }
        let path = self.dir.join("manifest.txt");
        fs::write(&path, out).map_err(HarnessError::io(&path))?;
        Ok(path)
    }
}

/// Re-hash every artifact a manifest lists and return the relative paths
/// that are missing or no longer match.
pub fn verify_manifest(dir: &Path) -> Result<Vec<String>> {
    let manifest_path = dir.join("manifest.txt");
    let text = fs::read_to_string(&manifest_path).map_err(HarnessError::io(&manifest_path))?;
    let mut mismatched = Vec::new();
    for line in text.lines() {
        let Some(rest) = line.strip_prefix("artifact ") else {
            continue;
        };
        let Some((relpath, expected)) = rest.rsplit_once(" = ") else {
            continue;
        };
        match fs::read(dir.join(relpath)) {
            Ok(bytes) if sha256_hex(&bytes) == expected => {}
            _ => mismatched.push(relpath.to_string()),
        }
    }
    Ok(mismatched)
}

/// Manifest lines that must agree between byte-identical reruns — all of
/// them except the wall-clock stamp.
pub fn reproducible_manifest_lines(text: &str) -> Vec<&str> {
    text.lines()
        .filter(|line| !line.starts_with("generated_unix"))
        .collect()
}
