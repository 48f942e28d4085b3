//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;

use sha_core::ansatz::{build_ansatz, build_qaoa, constant_speed_init, ArchitectureId, Circuit, Layer};
use sha_core::bench::config::ExperimentConfig;
use sha_core::bench::metrics::{accuracy, most_likely_accuracy};
use sha_core::bench::runner::{load_cell, run_matrix, MatrixOutcome, RunOptions};
use sha_core::optimize::parameter_shift_gradient;
use sha_core::pauli::{expectation_exact, Axis, PauliSum, PauliTerm};
use sha_core::problems::{coloring_hamiltonian, parse_fixture, GraphInstance};
use sha_core::rng::rng_from_seed;
use sha_core::simulator::{run_circuit, Angle, Gate, GateKind, Statevector};
use sha_core::strategies::{train_sha, train_svqe, PartitionStrategy, Problem, RunRecord, TrainingConfig};

type Outcome = Result<String, String>;

fn manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn load_dir(dir: &Path) -> Vec<(String, GraphInstance)> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "txt"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            (name, parse_fixture(&std::fs::read_to_string(&p).unwrap()).unwrap())
        })
        .collect()
}

fn desk_fixtures() -> Vec<(String, GraphInstance)> {
    load_dir(&manifest().join("fixtures/desk"))
}

fn all_fixtures() -> Vec<(String, GraphInstance)> {
    let mut v = desk_fixtures();
    v.extend(load_dir(&manifest().join("fixtures/reference")));
    v
}

/// Monochromatic edges of basis state `b`, reading node colors straight from the bits.
fn conflicts_oracle(g: &GraphInstance, b: usize) -> usize {
    let m = g.m_bits();
    let color = |v: usize| (b >> (v * m)) & ((1 << m) - 1);
    g.edges().iter().filter(|&&(u, v)| color(u) == color(v)).count()
}

fn hamiltonian_oracle() -> Outcome {
    let start = Instant::now();
    let fixtures = desk_fixtures();
    for (name, g) in &fixtures {
        if g.n_nodes() != 4 || g.k_colors() != 4 {
            return Err(format!("{name} is not a 4-node, 4-color fixture"));
        }
        let diag = coloring_hamiltonian(g).unwrap().sum.diagonal().unwrap();
        if diag.len() != 256 {
            return Err(format!("{name}: diagonal has {} entries", diag.len()));
        }
        for (b, d) in diag.iter().enumerate() {
            let want = 16.0 * conflicts_oracle(g, b) as f64;
            if *d != want {
                return Err(format!("{name}: basis {b} has {d}, want {want}"));
            }
        }
    }
    let t = start.elapsed();
    if t >= Duration::from_secs(1) {
        return Err(format!("took {t:?}"));
    }
    Ok(format!("{} fixtures x 256 states exact in {t:?}", fixtures.len()))
}

fn locality_budget() -> Outcome {
    let want: BTreeMap<usize, usize> = [(0, 1), (2, 2), (4, 1)].into();
    let fixtures = all_fixtures();
    for (name, g) in &fixtures {
        let ch = coloring_hamiltonian(g).unwrap();
        for e in 0..g.edges().len() {
            let terms: Vec<PauliTerm> = ch
                .sum
                .terms()
                .iter()
                .zip(&ch.term_edge)
                .filter(|(_, &te)| te == e)
                .map(|(t, _)| t.clone())
                .collect();
            let edge = PauliSum::new(g.n_qubits(), terms).unwrap().simplify();
            let hist = edge.locality_histogram();
            if hist != want {
                return Err(format!("{name}: edge {e} has {hist:?}"));
            }
        }
        let budget = g.edges().len() * g.k_colors();
        let problem = Problem::from_graph(name.as_str(), g.clone()).unwrap();
        if problem.terms.len() > budget || ch.simplified().len() > budget {
            return Err(format!("{name}: {} terms > {budget}", problem.terms.len()));
        }
    }
    Ok(format!("{} fixtures, every edge {{0:1, 2:2, 4:1}}", fixtures.len()))
}

fn random_circuit(seed: u64) -> (Circuit, PauliSum) {
    let n = 4;
    let mut rng = rng_from_seed(seed);
    let mut slot = 0;
    let mut next = |kind: GateKind, qubits: Vec<usize>| {
        let g = Gate::new(kind, qubits, Some(Angle::Slot { slot, scale: 1.0 })).unwrap();
        slot += 1;
        g
    };
    let mut layers = Vec::new();
    for _ in 0..rng.random_range(2..5) {
        let mut gates = Vec::new();
        for q in 0..n {
            let kind = [GateKind::Rx, GateKind::Ry, GateKind::Rz][rng.random_range(0..3)];
            gates.push(next(kind, vec![q]));
        }
        for q in 0..n - 1 {
            gates.push(Gate::fixed(GateKind::Cnot, vec![q, q + 1]).unwrap());
        }
        let a = rng.random_range(0..n);
        let b = (a + rng.random_range(1..n)) % n;
        gates.push(next(GateKind::Rzz, vec![a, b]));
        gates.push(next(GateKind::MultiZPhase, vec![0, 1, 2]));
        gates.push(Gate::fixed(GateKind::H, vec![rng.random_range(0..n)]).unwrap());
        layers.push(Layer::new(gates, false));
    }
    let circuit = Circuit::new(n, layers).unwrap();
    let axes = [Axis::X, Axis::Y, Axis::Z];
    let terms = (0..5)
        .map(|_| {
            let mut ops: Vec<(usize, Axis)> = Vec::new();
            for q in 0..n {
                if rng.random_bool(0.5) {
                    ops.push((q, axes[rng.random_range(0..3)]));
                }
            }
            PauliTerm::new(rng.random_range(-2.0..2.0), ops).unwrap()
        })
        .collect();
    (circuit, PauliSum::new(n, terms).unwrap())
}

fn shift_vs_differences() -> Outcome {
    let start = Instant::now();
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let (circuit, sum) = random_circuit(1000 + seed);
        let mut rng = rng_from_seed(seed);
        let params: Vec<f64> = (0..circuit.param_count()).map(|_| rng.random_range(-PI..PI)).collect();
        let mask = vec![true; params.len()];
        let grad = parameter_shift_gradient(&circuit, &sum, &params, &mask).unwrap();
        let zero = Statevector::zero(4).unwrap();
        let energy = |p: &[f64]| expectation_exact(&run_circuit(&circuit, p, &zero).unwrap(), &sum).unwrap();
        for i in 0..params.len() {
            let mut up = params.clone();
            let mut down = params.clone();
            up[i] += h;
            down[i] -= h;
            let fd = (energy(&up) - energy(&down)) / (2.0 * h);
            let err = (fd - grad[i]).abs();
            worst = worst.max(err);
            if err > 1e-6 {
                return Err(format!("circuit {seed}, slot {i}: shift {} vs fd {fd}", grad[i]));
            }
        }
    }
    let t = start.elapsed();
    if t >= Duration::from_secs(10) {
        return Err(format!("took {t:?}"));
    }
    Ok(format!("20 circuits, max deviation {worst:.2e}, {t:?}"))
}

fn qaoa_construction() -> Outcome {
    let (_, g) = &desk_fixtures()[0];
    let h = coloring_hamiltonian(g).unwrap().simplified();
    let circuit = build_qaoa(&h, 3).unwrap();
    if circuit.param_count() != 6 {
        return Err(format!("p=3 has {} parameters", circuit.param_count()));
    }
    let init = constant_speed_init(3);
    let want: [f64; 6] = [1.0 - 1.0 / 3.0, 1.0 - 2.0 / 3.0, 0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0];
    if init.iter().zip(&want).any(|(a, b)| a.to_bits() != b.to_bits()) {
        return Err(format!("init {init:?}"));
    }
    let mut worst: f64 = 0.0;
    for &(c, beta, gamma) in &[(1.0, 0.3, 0.7), (-0.5, 1.1, -0.4), (2.0, -0.9, 0.25)] {
        let sum = PauliSum::new(1, vec![PauliTerm::z_string(c, [0]).unwrap()]).unwrap();
        let circuit = build_qaoa(&sum, 1).unwrap();
        let state = run_circuit(&circuit, &[beta, gamma], &Statevector::zero(1).unwrap()).unwrap();
        // RX(-2β) · diag(e^{-icγ}, e^{icγ}) · H|0>
        let s = 1.0 / 2f64.sqrt();
        let phase = Complex64::from_polar(1.0, -c * gamma);
        let plus = [phase * s, phase.conj() * s];
        let (cb, sb) = (beta.cos(), Complex64::new(0.0, beta.sin()));
        let oracle = [cb * plus[0] + sb * plus[1], sb * plus[0] + cb * plus[1]];
        for (a, b) in state.amplitudes().iter().zip(&oracle) {
            worst = worst.max((a - b).norm());
        }
    }
    if worst > 1e-10 {
        return Err(format!("single-qubit deviation {worst:e}"));
    }
    Ok(format!("6 parameters, exact init, 2x2 deviation {worst:.1e}"))
}

fn bit_identical(a: &RunRecord, b: &RunRecord) -> bool {
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    let traj = |r: &RunRecord| {
        r.stages
            .iter()
            .flat_map(|s| s.result.trajectory.iter().map(|&(i, v)| (i, v.to_bits())))
            .collect::<Vec<_>>()
    };
    a.stages.len() == b.stages.len()
        && traj(a) == traj(b)
        && bits(&a.final_params) == bits(&b.final_params)
        && a.metric_trace == b.metric_trace
        && a.total_iterations == b.total_iterations
        && a.final_accuracy.map(f64::to_bits) == b.final_accuracy.map(f64::to_bits)
}

fn degenerate_equivalence() -> Outcome {
    let mut compared = 0;
    for (name, g) in desk_fixtures().into_iter().take(2) {
        let problem = Problem::from_graph(name.as_str(), g).unwrap();
        let circuit = build_ansatz(ArchitectureId::A3, problem.n_qubits(), 3).unwrap();
        for seed in 0..5 {
            let cfg = TrainingConfig {
                max_iters: 400,
                seed,
                ..TrainingConfig::default()
            };
            let partition = problem.partition(PartitionStrategy::Nodewise, 1, seed).unwrap();
            let sha = train_sha(&problem, &circuit, &partition, &cfg).unwrap();
            let svqe = train_svqe(&problem, &circuit, &cfg).unwrap();
            if !bit_identical(&sha, &svqe) {
                return Err(format!("{name}, seed {seed}: trajectories differ"));
            }
            compared += 1;
        }
    }
    Ok(format!("{compared} runs bit-identical"))
}

fn desk_config() -> ExperimentConfig {
    ExperimentConfig::load(&manifest().join("configs/desk.toml")).unwrap()
}

fn run_desk(out: &Path) -> (MatrixOutcome, Duration) {
    let mut cfg = desk_config();
    cfg.output_dir = out.to_path_buf();
    let start = Instant::now();
    let outcome = run_matrix(&cfg, RunOptions::default()).unwrap();
    assert!(outcome.failures.is_empty(), "failed cells: {:?}", outcome.failures);
    (outcome, start.elapsed())
}

fn continuity(desk: &MatrixOutcome) -> Outcome {
    let mut runs = 0;
    let mut checked = 0;
    let mut worst: f64 = 1.0;
    for row in desk.rows.iter().filter(|r| r.strategy.contains("LVQE")) {
        let (_, record) = load_cell(&desk.output_dir, &row.cell).unwrap().expect("stored cell");
        let fidelities: Vec<f64> = record.stages.iter().filter_map(|s| s.start_fidelity).collect();
        if fidelities.is_empty() {
            return Err(format!("{}: no layer-growth stages recorded", row.cell));
        }
        for f in fidelities {
            worst = worst.min(f);
            if f < 1.0 - 1e-10 {
                return Err(format!("{}: start fidelity {f}", row.cell));
            }
            checked += 1;
        }
        runs += 1;
    }
    if runs == 0 {
        return Err("no layer-growth runs in the desk suite".into());
    }
    Ok(format!("{runs} runs, {checked} stages, min fidelity {worst}"))
}

fn mean_of(desk: &MatrixOutcome, label: &str) -> Result<(f64, f64), String> {
    desk.summary
        .iter()
        .find(|s| s.strategy == label)
        .map(|s| (s.accuracy.mean, s.iterations.mean))
        .ok_or_else(|| format!("{label} missing from summary"))
}

fn directional(desk: &MatrixOutcome, elapsed: Duration) -> Outcome {
    let over: Vec<_> = desk.rows.iter().filter(|r| r.total_iterations > 800).collect();
    if let Some(r) = over.first() {
        return Err(format!("{} used {} iterations", r.cell, r.total_iterations));
    }
    let (svqe, _) = mean_of(desk, "SVQE")?;
    let (m1, _) = mean_of(desk, "SHA-NW1")?;
    let (m2, _) = mean_of(desk, "SHA-NW2")?;
    let (m4, _) = mean_of(desk, "SHA-NW4")?;
    let detail = format!("SVQE {svqe:.4}, SHA M=1/2/4 {m1:.4}/{m2:.4}/{m4:.4}, suite {elapsed:.1?}");
    if !(m4 > svqe) {
        return Err(format!("no improvement: {detail}"));
    }
    if !(m1 <= m2 && m2 <= m4) {
        return Err(format!("not monotone in M: {detail}"));
    }
    if elapsed >= Duration::from_secs(30 * 60) {
        return Err(format!("too slow: {detail}"));
    }
    Ok(detail)
}

fn hybrid_cost(desk: &MatrixOutcome) -> Outcome {
    let (_, lvqe) = mean_of(desk, "LVQE")?;
    let (_, hybrid) = mean_of(desk, "SHA-NW4+LVQE")?;
    if hybrid > lvqe {
        Ok(format!("SHA-NW4+LVQE {hybrid:.1} > LVQE {lvqe:.1} iterations"))
    } else {
        Err(format!("SHA-NW4+LVQE {hybrid:.1} <= LVQE {lvqe:.1} iterations"))
    }
}

fn uniform_and_windowing() -> Outcome {
    let fixtures = all_fixtures();
    for (name, g) in &fixtures {
        let ratio = g.hardness().expect("fixture hardness").solution_ratio;
        let acc = accuracy(&Statevector::uniform(g.n_qubits()).unwrap(), &g.proper_mask().unwrap()).unwrap();
        if acc != ratio {
            return Err(format!("{name}: uniform accuracy {acc} vs ratio {ratio}"));
        }
    }
    let mut last_true = vec![false; 49];
    last_true.push(true);
    let mut alternating: Vec<bool> = (0..100).map(|i| i % 2 == 0).collect();
    alternating[99] = true;
    let traces: [(&[bool], f64, f64); 3] = [
        (&last_true, 0.02, 1.0),
        (&last_true, 0.04, 0.5),
        // window of 3: indices 97, 98, 99
        (&alternating, 0.03, 2.0 / 3.0),
    ];
    for (i, (flags, f, want)) in traces.iter().enumerate() {
        let got = most_likely_accuracy(flags, *f).unwrap();
        if got != *want {
            return Err(format!("trace {i}: {got} vs {want}"));
        }
    }
    Ok(format!("{} fixtures exact, 3 traces", fixtures.len()))
}

fn determinism(first: &Path, second: &Path) -> Outcome {
    for file in ["rows.csv", "summary.csv", "improvements.csv"] {
        let a = std::fs::read(first.join(file)).map_err(|e| format!("{file}: {e}"))?;
        let b = std::fs::read(second.join(file)).map_err(|e| format!("{file}: {e}"))?;
        if a != b {
            return Err(format!("{file} differs between runs"));
        }
    }
    Ok("rows.csv, summary.csv, improvements.csv byte-identical".into())
}

fn check(id: usize, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    match outcome {
        Ok(detail) => {
            println!("criterion {id:>2} {name}: PASS ({detail})");
            true
        }
        Err(detail) => {
            println!("criterion {id:>2} {name}: FAIL ({detail})");
            false
        }
    }
}

fn main() -> ExitCode {
    let mut ok = true;
    ok &= check(1, "hamiltonian diagonal", hamiltonian_oracle);
    ok &= check(2, "locality budget", locality_budget);
    ok &= check(3, "parameter shift", shift_vs_differences);
    ok &= check(4, "qaoa construction", qaoa_construction);
    ok &= check(5, "single-block equivalence", degenerate_equivalence);

    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let first = catch_unwind(|| run_desk(dirs[0].path()));
    let second = catch_unwind(|| run_desk(dirs[1].path()));
    match &first {
        Ok((desk, elapsed)) => {
            ok &= check(6, "layer continuity", || continuity(desk));
            ok &= check(7, "desk direction", || directional(desk, *elapsed));
            ok &= check(8, "hybrid cost", || hybrid_cost(desk));
        }
        Err(_) => {
            for (id, name) in [(6, "layer continuity"), (7, "desk direction"), (8, "hybrid cost")] {
                ok &= check(id, name, || Err("desk suite did not run".into()));
            }
        }
    }
    ok &= check(9, "uniform accuracy and windowing", uniform_and_windowing);
    ok &= check(10, "determinism", || match (&first, &second) {
        (Ok(_), Ok(_)) => determinism(dirs[0].path(), dirs[1].path()),
        _ => Err("desk suite did not run".into()),
    });

    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
