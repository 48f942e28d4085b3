//! Runs the experiment matrix and persists one record per cell.
//!
//! Layout of the output directory:
//!
//! - `runs/<cell>.jsonl`: the [`MetricRow`] on line 1, the full
//!   [`RunRecord`] on line 2
//! - `runs/<cell>.sha256`: hex SHA-256 of the `.jsonl` bytes
//! - `index.log`: one line per finished cell, append-only
//! - `rows.csv`, `summary.csv`, `improvements.csv`

use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{ExperimentConfig, Instance};
use super::metrics::{most_likely_accuracy, shot_accuracy};
use super::report::{aggregate, improvements, summary_csv, to_csv, MetricRow, SummaryRow, SCHEMA_VERSION};
use crate::ansatz::ArchitectureId;
use crate::error::{Error, Result};
use crate::optimize::Shots;
use crate::rng::derive_seed;
use crate::simulator::{run_circuit, Statevector};
use crate::strategies::{run_strategy, Problem, RunRecord, StrategyKind, StrategySpec, TrainingConfig};

/// Seed tag for the optional shot-based readout of final states.
const READOUT_TAG: u64 = 0x5245_4144;

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Overrides the config's parallelism when set.
    pub parallel: Option<usize>,
    pub resume: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub cell: String,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct MatrixOutcome {
    pub output_dir: PathBuf,
    pub rows: Vec<MetricRow>,
    pub summary: Vec<SummaryRow>,
    pub failures: Vec<CellFailure>,
    /// Cells whose stored records were reused.
    pub resumed: usize,
}

#[derive(Debug, Clone)]
pub struct Cell {
    pub id: String,
    pub instance: usize,
    pub architecture: ArchitectureId,
    pub label: String,
    pub spec: StrategySpec,
    pub seed: u64,
}

fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| match c {
            'a'..='z' | 'A'..='Z' | '0'..='9' | '-' | '_' | '.' => c,
            '+' => 'p',
            _ => '_',
        })
        .collect()
}

/// All cells in matrix order: instance, architecture, strategy, seed.
/// QAOA ignores the architecture and runs once per instance and seed.
pub fn enumerate_cells(cfg: &ExperimentConfig, instances: &[Instance]) -> Result<Vec<Cell>> {
    let archs = cfg.architecture_ids()?;
    let specs = cfg.strategy_specs()?;
    let mut out = Vec::new();
    for (ii, inst) in instances.iter().enumerate() {
        for (ai, &arch) in archs.iter().enumerate() {
            for (label, spec) in &specs {
                let arch = if spec.kind == StrategyKind::Qaoa {
                    if ai > 0 {
                        continue;
                    }
                    ArchitectureId::Qaoa
                } else {
                    arch
                };
                for &seed in &cfg.seeds {
                    out.push(Cell {
                        id: sanitize(&format!("{}__{}__{}__s{}", inst.id, arch, label, seed)),
                        instance: ii,
                        architecture: arch,
                        label: label.clone(),
                        spec: spec.clone(),
                        seed,
                    });
                }
            }
        }
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct RecordLine<'a> {
    schema_version: u32,
    #[serde(borrow)]
    cell: &'a str,
    record: RunRecord,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn cell_paths(dir: &Path, cell: &str) -> (PathBuf, PathBuf) {
    let runs = dir.join("runs");
    (runs.join(format!("{cell}.jsonl")), runs.join(format!("{cell}.sha256")))
}

/// Reads a stored cell, verifying its checksum. `Ok(None)` when absent or
/// corrupt.
pub fn load_cell(dir: &Path, cell: &str) -> Result<Option<(MetricRow, RunRecord)>> {
    let (data, sum) = cell_paths(dir, cell);
    let (Ok(bytes), Ok(expected)) = (fs::read(&data), fs::read_to_string(&sum)) else {
        return Ok(None);
    };
    if sha256_hex(&bytes) != expected.trim() {
        return Ok(None);
    }
    let text = String::from_utf8(bytes).map_err(|e| Error::Config(format!("{cell}: {e}")))?;
    let mut lines = text.lines();
    let (Some(row_line), Some(rec_line)) = (lines.next(), lines.next()) else {
        return Ok(None);
    };
    let row: MetricRow = match serde_json::from_str(row_line) {
        Ok(r) => r,
        Err(_) => return Ok(None),
    };
    let rec: RecordLine = match serde_json::from_str(rec_line) {
        Ok(r) => r,
        Err(_) => return Ok(None),
    };
    Ok(Some((row, rec.record)))
}

fn write_cell(dir: &Path, cell: &str, row: &MetricRow, record: RunRecord) -> Result<String> {
    let line = |v: serde_json::Result<String>| v.map_err(|e| Error::InvalidArgument(e.to_string()));
    let mut text = line(serde_json::to_string(row))?;
    text.push('\n');
    text.push_str(&line(serde_json::to_string(&RecordLine {
        schema_version: SCHEMA_VERSION,
        cell,
        record,
    }))?);
    text.push('\n');
    let digest = sha256_hex(text.as_bytes());
    let (data, sum) = cell_paths(dir, cell);
    write_atomic(&data, text.as_bytes())?;
    write_atomic(&sum, format!("{digest}\n").as_bytes())?;
    Ok(digest)
}

fn training_config(cfg: &ExperimentConfig, seed: u64) -> TrainingConfig {
    TrainingConfig {
        shots: if cfg.shots == 0 {
            Shots::Exact
        } else {
            Shots::Count(cfg.shots)
        },
        max_iters: cfg.max_iters,
        seed,
        ..Default::default()
    }
}

/// Trains one cell and derives its metric row.
pub fn run_cell(cfg: &ExperimentConfig, instance: &Instance, cell: &Cell) -> Result<(MetricRow, RunRecord)> {
    let problem = Problem::from_graph(instance.id.clone(), instance.graph.clone())?;
    let tcfg = training_config(cfg, cell.seed);
    let mut record = run_strategy(&cell.spec, &problem, cell.architecture, cfg.n_layers, &tcfg)?;
    record.strategy_label = cell.label.clone();
    let row = metric_row(cfg, &problem, cell, &record)?;
    Ok((row, record))
}

fn metric_row(cfg: &ExperimentConfig, problem: &Problem, cell: &Cell, record: &RunRecord) -> Result<MetricRow> {
    let proper = problem.proper_mask().expect("graph problems carry a proper mask");
    let flags: Vec<bool> = record.metric_trace.iter().map(|m| m.most_likely_correct).collect();
    let final_shot_accuracy = if cfg.shot_metrics && cfg.shots > 0 {
        let circuit = crate::strategies::final_circuit(record, problem, cfg.n_layers)?;
        let state = run_circuit(&circuit, &record.final_params, &Statevector::zero(problem.n_qubits())?)?;
        let hist = state.sample_shots(cfg.shots, derive_seed(cell.seed, &[READOUT_TAG]))?;
        Some(shot_accuracy(&hist, proper)?)
    } else {
        None
    };
    Ok(MetricRow {
        schema_version: SCHEMA_VERSION,
        cell: cell.id.clone(),
        graph_id: record.graph_id.clone(),
        architecture: record.architecture.clone(),
        strategy: cell.label.clone(),
        seed: cell.seed,
        final_accuracy: record.final_accuracy.expect("graph problems report accuracy"),
        most_likely_accuracy: most_likely_accuracy(&flags, cfg.trailing_fraction)?,
        total_iterations: record.total_iterations,
        n_stages: record.stages.len(),
        final_shot_accuracy,
    })
}

/// Executes every cell (in parallel up to the configured degree) and writes
/// records and aggregate tables. Failed cells are logged and skipped.
pub fn run_matrix(cfg: &ExperimentConfig, opts: RunOptions) -> Result<MatrixOutcome> {
    let instances = cfg.load_instances()?;
    let cells = enumerate_cells(cfg, &instances)?;
    let dir = cfg.output_path();
    fs::create_dir_all(dir.join("runs")).map_err(|e| Error::io(&dir, e))?;
    let index_path = dir.join("index.log");
    let index = Mutex::new(
        OpenOptions::new()
            .create(true)
            .append(true)
            .open(&index_path)
            .map_err(|e| Error::io(&index_path, e))?,
    );
    let log = |index: &Mutex<File>, line: String| {
        let mut f = index.lock().unwrap_or_else(|p| p.into_inner());
        let _ = writeln!(f, "{line}");
    };

    let threads = opts.parallel.unwrap_or(cfg.parallel).max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let results: Vec<(Result<MetricRow>, bool)> = pool.install(|| {
        cells
            .par_iter()
            .map(|cell| {
                if opts.resume {
                    match load_cell(&dir, &cell.id) {
                        Ok(Some((row, _))) => return (Ok(row), true),
                        Ok(None) => {}
                        Err(e) => return (Err(e), false),
                    }
                }
                let res = run_cell(cfg, &instances[cell.instance], cell)
                    .and_then(|(row, record)| write_cell(&dir, &cell.id, &row, record).map(|d| (row, d)));
                match res {
                    Ok((row, digest)) => {
                        log(&index, format!("{} ok {}", cell.id, digest));
                        (Ok(row), false)
                    }
                    Err(e) => {
                        log(&index, format!("{} failed {}", cell.id, e));
                        (Err(e), false)
                    }
                }
            })
            .collect()
    });

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut resumed = 0;
    for (cell, (res, reused)) in cells.iter().zip(results) {
        resumed += usize::from(reused);
        match res {
            Ok(r) => rows.push(r),
            Err(e) => failures.push(CellFailure {
                cell: cell.id.clone(),
                message: e.to_string(),
            }),
        }
    }
    let summary = write_tables(&dir, &rows, &cfg.baseline)?;
    Ok(MatrixOutcome {
        output_dir: dir,
        rows,
        summary,
        failures,
        resumed,
    })
}

/// Writes `rows.csv`, `summary.csv` and, when the baseline is present,
/// `improvements.csv`.
pub fn write_tables(dir: &Path, rows: &[MetricRow], baseline: &str) -> Result<Vec<SummaryRow>> {
    write_atomic(&dir.join("rows.csv"), to_csv(rows)?.as_bytes())?;
    let summary = aggregate(rows);
    write_atomic(&dir.join("summary.csv"), summary_csv(&summary)?.as_bytes())?;
    if let Ok(imp) = improvements(&summary, baseline) {
        write_atomic(&dir.join("improvements.csv"), to_csv(&imp)?.as_bytes())?;
    }
    Ok(summary)
}

/// Rebuilds the metric rows of every valid stored record, in file-name order.
/// Rows are recomputed from the records with `trailing_fraction`.
pub fn collect_rows(dir: &Path, trailing_fraction: f64) -> Result<Vec<MetricRow>> {
    let runs = dir.join("runs");
    let mut names: Vec<String> = fs::read_dir(&runs)
        .map_err(|e| Error::io(&runs, e))?
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            let name = e.file_name().to_string_lossy().into_owned();
            name.strip_suffix(".jsonl").map(str::to_string)
        })
        .collect();
    names.sort();
    let mut rows = Vec::new();
    for name in names {
        if let Some((mut row, record)) = load_cell(dir, &name)? {
            let flags: Vec<bool> = record.metric_trace.iter().map(|m| m.most_likely_correct).collect();
            row.most_likely_accuracy = most_likely_accuracy(&flags, trailing_fraction)?;
            rows.push(row);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_ids_are_file_safe() {
        assert_eq!(sanitize("g1__A3__SHA-NW2+LVQE__s4"), "g1__A3__SHA-NW2pLVQE__s4");
        assert_eq!(sanitize("a/b c"), "a_b_c");
    }

    #[test]
    fn corrupt_cells_are_ignored() {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir_all(dir.path().join("runs")).unwrap();
        let (data, sum) = cell_paths(dir.path(), "x");
        fs::write(&data, "garbage\n").unwrap();
        fs::write(&sum, sha256_hex(b"other")).unwrap();
        assert!(load_cell(dir.path(), "x").unwrap().is_none());
        fs::write(&sum, sha256_hex(b"garbage\n")).unwrap();
        assert!(load_cell(dir.path(), "x").unwrap().is_none());
        assert!(load_cell(dir.path(), "missing").unwrap().is_none());
    }
}
