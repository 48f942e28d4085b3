use std::fs;
use std::path::Path;

use sha_core::bench::config::ExperimentConfig;
use sha_core::bench::metrics::most_likely_accuracy;
use sha_core::bench::plot::{write_plots, PlotKind};
use sha_core::bench::report::{read_summary, MetricRow};
use sha_core::bench::runner::{collect_rows, load_cell, run_matrix, write_tables, RunOptions};

fn small_config(out: &Path) -> ExperimentConfig {
    let text = format!(
        r#"
output_dir = "{}"
shots = 50
n_layers = 2
max_iters = 60
seeds = [0, 1, 2, 3, 4]
architectures = ["A1"]

[[generate]]
n = 3
p = 0.9
seed = 1
k = 2
count = 2

[[strategies]]
kind = "SVQE"

[[strategies]]
kind = "SHA"
partition = "CHRONOLOGICAL"
partitions = 2
"#,
        out.display()
    );
    ExperimentConfig::parse(&text, out).unwrap()
}

#[test]
fn matrix_has_one_row_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let outcome = run_matrix(&small_config(&out), RunOptions::default()).unwrap();
    assert!(outcome.failures.is_empty());
    assert_eq!(outcome.rows.len(), 2 * 1 * 2 * 5);
    assert_eq!(outcome.resumed, 0);
    let labels: Vec<&str> = outcome.summary.iter().map(|s| s.strategy.as_str()).collect();
    assert_eq!(labels, ["SVQE", "SHA-CHR2"]);
    assert!(outcome.summary.iter().all(|s| s.n == 10));
    for f in ["rows.csv", "summary.csv", "improvements.csv", "index.log"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let mut cells: Vec<&str> = outcome.rows.iter().map(|r| r.cell.as_str()).collect();
    cells.sort();
    cells.dedup();
    assert_eq!(cells.len(), 20);
}

#[test]
fn summary_recomputes_from_records() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let outcome = run_matrix(&small_config(&out), RunOptions::default()).unwrap();
    for row in &outcome.rows {
        let (stored, record) = load_cell(&out, &row.cell).unwrap().unwrap();
        assert_eq!(&stored, row);
        assert_eq!(record.final_accuracy, Some(row.final_accuracy));
        assert_eq!(record.total_iterations, row.total_iterations);
        assert_eq!(record.metric_trace.len(), record.total_iterations);
        let flags: Vec<bool> = record.metric_trace.iter().map(|m| m.most_likely_correct).collect();
        assert_eq!(most_likely_accuracy(&flags, 0.02).unwrap(), row.most_likely_accuracy);
    }
    let summary = read_summary(&out.join("summary.csv")).unwrap();
    for s in &summary {
        let mine: Vec<&MetricRow> = outcome.rows.iter().filter(|r| r.strategy == s.strategy).collect();
        let mean = mine.iter().map(|r| r.final_accuracy).sum::<f64>() / mine.len() as f64;
        let iters = mine.iter().map(|r| r.total_iterations as f64).sum::<f64>() / mine.len() as f64;
        assert!((s.accuracy.mean - mean).abs() < 1e-12);
        assert!((s.iterations.mean - iters).abs() < 1e-12);
        let (lo, hi) = mine
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.final_accuracy), hi.max(r.final_accuracy)));
        assert_eq!((s.accuracy.min, s.accuracy.max), (lo, hi));
    }
}

#[test]
fn resume_after_interruption_matches_fresh_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = small_config(&out);
    let fresh = run_matrix(&cfg, RunOptions::default()).unwrap();
    let rows_csv = fs::read(out.join("rows.csv")).unwrap();
    let summary_csv = fs::read(out.join("summary.csv")).unwrap();

    let runs = out.join("runs");
    let victims: Vec<String> = fresh.rows.iter().take(4).map(|r| r.cell.clone()).collect();
    for cell in &victims[..3] {
        fs::remove_file(runs.join(format!("{cell}.jsonl"))).unwrap();
    }
    let corrupt = runs.join(format!("{}.jsonl", victims[3]));
    let mut bytes = fs::read(&corrupt).unwrap();
    bytes.truncate(bytes.len() / 2);
    fs::write(&corrupt, bytes).unwrap();
    fs::remove_file(out.join("rows.csv")).unwrap();

    let resumed = run_matrix(
        &cfg,
        RunOptions {
            parallel: Some(2),
            resume: true,
        },
    )
    .unwrap();
    assert_eq!(resumed.resumed, 16);
    assert_eq!(resumed.rows, fresh.rows);
    assert_eq!(fs::read(out.join("rows.csv")).unwrap(), rows_csv);
    assert_eq!(fs::read(out.join("summary.csv")).unwrap(), summary_csv);
}

#[test]
fn report_rebuilds_tables_and_plots_are_stable() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let outcome = run_matrix(&small_config(&out), RunOptions::default()).unwrap();
    let original = fs::read(out.join("summary.csv")).unwrap();

    let mut rows = collect_rows(&out, 0.02).unwrap();
    assert_eq!(rows.len(), 20);
    // file-name order differs from matrix order; summary keeps first-appearance order
    let order: Vec<String> = outcome.summary.iter().map(|s| s.strategy.clone()).collect();
    rows.sort_by_key(|r| order.iter().position(|s| *s == r.strategy));
    let mut expected = outcome.rows.clone();
    expected.sort_by_key(|r| order.iter().position(|s| *s == r.strategy));
    let key = |r: &MetricRow| r.cell.clone();
    rows.sort_by_key(key);
    expected.sort_by_key(key);
    assert_eq!(rows, expected);

    let summary = write_tables(&out, &outcome.rows, "SVQE").unwrap();
    assert_eq!(fs::read(out.join("summary.csv")).unwrap(), original);

    let first = write_plots(&out, &summary, &PlotKind::ALL).unwrap();
    let bytes: Vec<Vec<u8>> = first.iter().map(|p| fs::read(p).unwrap()).collect();
    let second = write_plots(&out, &read_summary(&out.join("summary.csv")).unwrap(), &PlotKind::ALL).unwrap();
    for (p, b) in second.iter().zip(&bytes) {
        assert_eq!(&fs::read(p).unwrap(), b, "{} changed", p.display());
        let svg = String::from_utf8(b.clone()).unwrap();
        assert_eq!(svg.matches(r#"class="group""#).count(), 2);
    }
}

#[test]
fn relative_output_resolves_against_config_dir() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("exp.toml");
    fs::write(
        &cfg_path,
        "output_dir = \"results\"\nseeds = [0]\narchitectures = [\"A1\"]\n[[generate]]\nn = 2\np = 1.0\nseed = 0\nk = 2\n[[strategies]]\nkind = \"SVQE\"\n",
    )
    .unwrap();
    let cfg = ExperimentConfig::load(&cfg_path).unwrap();
    assert_eq!(cfg.output_dir, Path::new("results"));
    if std::env::var_os("SHA_OUTPUT_ROOT").is_none() {
        assert_eq!(cfg.output_path(), dir.path().join("results"));
    }
}
