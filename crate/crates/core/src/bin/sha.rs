use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sha_core::bench::config::ExperimentConfig;
use sha_core::bench::plot::{write_plots, PlotKind};
use sha_core::bench::report::{format_table, improvements, read_summary};
use sha_core::bench::runner::{collect_rows, run_matrix, write_tables, RunOptions};
use sha_core::problems::{generate_connected, generate_graph, parse_fixture, reference_instance, write_fixture, REFERENCE_SUITE};
use sha_core::strategies::{PartitionStrategy, Problem};
use sha_core::Error;

#[derive(Parser)]
#[command(name = "sha", version, about = "Graph-coloring VQE training schedules and benchmark matrix")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write graph fixtures.
    Generate {
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Skip disconnected samples.
        #[arg(long)]
        connected: bool,
        /// Write the ten 8-node, 4-color reference instances instead.
        #[arg(long, conflicts_with_all = ["n", "p", "count"])]
        reference: bool,
        #[arg(long, default_value = "graph")]
        prefix: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the coloring Hamiltonian of a fixture, one term per line.
    ExportHamiltonian {
        fixture: PathBuf,
        /// Merge like terms across edges.
        #[arg(long)]
        simplified: bool,
        /// Also print the blocks of a partition (random, chronological, nodewise).
        #[arg(long, requires = "partitions")]
        partition: Option<String>,
        #[arg(long)]
        partitions: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run an experiment matrix from a TOML config.
    Run {
        config: PathBuf,
        #[arg(long)]
        parallel: Option<usize>,
        /// Reuse stored cells whose checksums verify.
        #[arg(long)]
        resume: bool,
    },
    /// Rebuild the tables of an output directory from its run records.
    Report {
        dir: PathBuf,
        #[arg(long, default_value = "SVQE")]
        baseline: String,
        #[arg(long, default_value_t = 0.02)]
        trailing_fraction: f64,
    },
    /// Render SVG plots from an output directory's summary.csv.
    Plot {
        dir: PathBuf,
        /// accuracy_box, most_likely_box or iterations_bar; all when omitted.
        #[arg(long)]
        kind: Vec<String>,
    },
}

enum Failure {
    Config(Error),
    Partial(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Config(e)
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn generate(cmd: Command) -> Result<(), Failure> {
    let Command::Generate {
        n,
        p,
        seed,
        k,
        count,
        connected,
        reference,
        prefix,
        out,
    } = cmd
    else {
        unreachable!()
    };
    std::fs::create_dir_all(&out).map_err(|e| Error::Io {
        path: out.clone(),
        source: e,
    })?;
    let mut graphs = Vec::new();
    if reference {
        for i in 0..REFERENCE_SUITE.len() {
            let g = reference_instance(i, seed)?;
            graphs.push((format!("{prefix}-{:02}", i + 1), g));
        }
    } else {
        let mut s = seed;
        for i in 0..count {
            let g = if connected {
                generate_connected(n, p, s, k, 1, 10_000)?
            } else {
                generate_graph(n, p, s, k)?.with_hardness()?
            };
            s = g.seed + 1;
            graphs.push((format!("{prefix}-{:02}", i + 1), g));
        }
    }
    for (name, g) in graphs {
        let path = out.join(format!("{name}.txt"));
        write_file(&path, &write_fixture(&g)?)?;
        let h = g.hardness().expect("hardness filled");
        println!(
            "{} nodes={} edges={} seed={} solutions={} ratio={}",
            path.display(),
            g.n_nodes(),
            g.edges().len(),
            g.seed,
            h.solution_count,
            h.solution_ratio
        );
    }
    Ok(())
}

fn export(fixture: &Path, simplified: bool, partition: Option<String>, m: Option<usize>, seed: u64) -> Result<(), Failure> {
    let text = std::fs::read_to_string(fixture).map_err(|e| Error::Io {
        path: fixture.to_path_buf(),
        source: e,
    })?;
    let graph = parse_fixture(&text)?;
    let problem = Problem::from_graph("fixture", graph)?;
    let h = if simplified {
        problem.terms.simplify()
    } else {
        problem.terms.clone()
    };
    print!("{}", h.to_text());
    if let (Some(kind), Some(m)) = (partition, m) {
        let kind: PartitionStrategy = kind.parse()?;
        let part = problem.partition(kind, m, seed)?;
        for (j, block) in part.blocks().iter().enumerate() {
            let idx: Vec<String> = block.iter().map(usize::to_string).collect();
            println!("# block {} {}", j + 1, idx.join(" "));
        }
    }
    Ok(())
}

fn run(config: &Path, parallel: Option<usize>, resume: bool) -> Result<(), Failure> {
    let cfg = ExperimentConfig::load(config)?;
    let outcome = run_matrix(&cfg, RunOptions { parallel, resume })?;
    let imp = improvements(&outcome.summary, &cfg.baseline).unwrap_or_default();
    print!("{}", format_table(&outcome.summary, &imp));
    println!(
        "{} rows ({} resumed) written to {}",
        outcome.rows.len(),
        outcome.resumed,
        outcome.output_dir.display()
    );
    for f in &outcome.failures {
        eprintln!("cell {} failed: {}", f.cell, f.message);
    }
    if outcome.failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Partial(outcome.failures.len()))
    }
}

fn report(dir: &Path, baseline: &str, trailing_fraction: f64) -> Result<(), Failure> {
    let rows = collect_rows(dir, trailing_fraction)?;
    if rows.is_empty() {
        return Err(Error::Config(format!("no run records under {}", dir.display())).into());
    }
    let summary = write_tables(dir, &rows, baseline)?;
    let imp = improvements(&summary, baseline).unwrap_or_default();
    print!("{}", format_table(&summary, &imp));
    Ok(())
}

fn plot(dir: &Path, kinds: &[String]) -> Result<(), Failure> {
    let kinds: Vec<PlotKind> = if kinds.is_empty() {
        PlotKind::ALL.to_vec()
    } else {
        kinds.iter().map(|k| k.parse()).collect::<Result<_, _>>()?
    };
    let summary = read_summary(&dir.join("summary.csv"))?;
    for path in write_plots(dir, &summary, &kinds)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        cmd @ Command::Generate { .. } => generate(cmd),
        Command::ExportHamiltonian {
            fixture,
            simplified,
            partition,
            partitions,
            seed,
        } => export(&fixture, simplified, partition, partitions, seed),
        Command::Run {
            config,
            parallel,
            resume,
        } => run(&config, parallel, resume),
        Command::Report {
            dir,
            baseline,
            trailing_fraction,
        } => report(&dir, &baseline, trailing_fraction),
        Command::Plot { dir, kind } => plot(&dir, &kind),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Partial(n)) => {
            eprintln!("{n} cell(s) failed");
            ExitCode::from(2)
        }
    }
}
