//! Training schedules: plain VQE, Sequential Hamiltonian Assembly (SHA),
//! Layerwise Learning, Layer-VQE, QAOA and the SHA hybrids.
//!
//! Every schedule is a list of stages. A stage fixes a circuit prefix, a set
//! of trainable slots and a Hamiltonian (a subset of terms), then calls
//! [`minimize`] warm-started from the previous stage's best parameters.
//! Subset stages run at the coarse threshold; the final full stage runs at
//! the fine threshold.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::ansatz::{build_ansatz, build_qaoa, constant_speed_init, ry_layer, ArchitectureId, Circuit};
use crate::bench::metrics::{accuracy_from_probabilities, modal_index};
use crate::error::{Error, Result};
use crate::optimize::{minimize, Objective, OptimConfig, OptimResult, SeedPolicy, Shots};
use crate::pauli::{Partition, PauliSum};
use crate::problems::{bfs_order, coloring_hamiltonian, ColoringHamiltonian, GraphInstance};
use crate::rng::{derive_seed, rng_from_seed};
use crate::simulator::{run_circuit, ShotHistogram, Statevector};

/// Seed tag for random partitions.
const PARTITION_TAG: u64 = 0x5041_5254;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StrategyKind {
    #[serde(rename = "SVQE")]
    Svqe,
    #[serde(rename = "SHA")]
    Sha,
    #[serde(rename = "LL")]
    Ll,
    #[serde(rename = "LVQE")]
    Lvqe,
    #[serde(rename = "QAOA")]
    Qaoa,
    #[serde(rename = "SHA_LL")]
    ShaLl,
    #[serde(rename = "SHA_LVQE")]
    ShaLvqe,
}

impl StrategyKind {
    pub fn uses_partition(self) -> bool {
        matches!(self, Self::Sha | Self::ShaLl | Self::ShaLvqe)
    }

    pub fn uses_ll_params(self) -> bool {
        matches!(self, Self::Ll | Self::ShaLl)
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Svqe => "SVQE",
            Self::Sha => "SHA",
            Self::Ll => "LL",
            Self::Lvqe => "LVQE",
            Self::Qaoa => "QAOA",
            Self::ShaLl => "SHA_LL",
            Self::ShaLvqe => "SHA_LVQE",
        })
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().replace(['-', '+'], "_").as_str() {
            "SVQE" | "VQE" => Self::Svqe,
            "SHA" => Self::Sha,
            "LL" => Self::Ll,
            "LVQE" | "L_VQE" => Self::Lvqe,
            "QAOA" => Self::Qaoa,
            "SHA_LL" => Self::ShaLl,
            "SHA_LVQE" | "SHA_L_VQE" => Self::ShaLvqe,
            _ => return Err(Error::InvalidArgument(format!("unknown strategy kind {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PartitionStrategy {
    Random,
    Chronological,
    Nodewise,
}

impl PartitionStrategy {
    fn short(self) -> &'static str {
        match self {
            Self::Random => "RND",
            Self::Chronological => "CHR",
            Self::Nodewise => "NW",
        }
    }
}

impl FromStr for PartitionStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "RANDOM" | "RND" => Self::Random,
            "CHRONOLOGICAL" | "CHR" => Self::Chronological,
            "NODEWISE" | "NW" => Self::Nodewise,
            _ => return Err(Error::InvalidArgument(format!("unknown partition strategy {s:?}"))),
        })
    }
}

/// Layerwise Learning hyperparameters: start with `s` layers, add `p` at a
/// time, train the last `q`; phase 2 windows cover `⌈r·L⌉` layers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LlParams {
    pub s: usize,
    pub p: usize,
    pub q: usize,
    pub r: f64,
}

impl Default for LlParams {
    fn default() -> Self {
        Self { s: 1, p: 1, q: 1, r: 1.0 }
    }
}

impl LlParams {
    pub fn validate(&self) -> Result<()> {
        if self.s == 0 || self.p == 0 || self.q == 0 {
            return Err(Error::InvalidArgument("LL needs s, p, q >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.r) {
            return Err(Error::InvalidArgument(format!("LL r = {} outside [0, 1]", self.r)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategySpec {
    pub kind: StrategyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition_strategy: Option<PartitionStrategy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_partitions: Option<usize>,
    /// Per-stage evaluation budgets; missing entries use the defaults.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_stage_max_iters: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ll_params: Option<LlParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qaoa_p: Option<usize>,
}

impl StrategySpec {
    fn bare(kind: StrategyKind) -> Self {
        Self {
            kind,
            partition_strategy: None,
            n_partitions: None,
            per_stage_max_iters: Vec::new(),
            ll_params: None,
            qaoa_p: None,
        }
    }

    pub fn svqe() -> Self {
        Self::bare(StrategyKind::Svqe)
    }

    pub fn sha(partition: PartitionStrategy, m: usize) -> Self {
        Self {
            partition_strategy: Some(partition),
            n_partitions: Some(m),
            ..Self::bare(StrategyKind::Sha)
        }
    }

    pub fn ll(params: LlParams) -> Self {
        Self {
            ll_params: Some(params),
            ..Self::bare(StrategyKind::Ll)
        }
    }

    pub fn lvqe() -> Self {
        Self::bare(StrategyKind::Lvqe)
    }

    pub fn qaoa(p: usize) -> Self {
        Self {
            qaoa_p: Some(p),
            ..Self::bare(StrategyKind::Qaoa)
        }
    }

    pub fn sha_ll(partition: PartitionStrategy, m: usize, params: LlParams) -> Self {
        Self {
            kind: StrategyKind::ShaLl,
            ll_params: Some(params),
            ..Self::sha(partition, m)
        }
    }

    pub fn sha_lvqe(partition: PartitionStrategy, m: usize) -> Self {
        Self {
            kind: StrategyKind::ShaLvqe,
            ..Self::sha(partition, m)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind.uses_partition() {
            if self.partition_strategy.is_none() {
                return Err(Error::InvalidArgument(format!("{} needs a partition strategy", self.kind)));
            }
            if !self.n_partitions.is_some_and(|m| m >= 1) {
                return Err(Error::InvalidArgument(format!("{} needs n_partitions >= 1", self.kind)));
            }
        }
        if self.kind.uses_ll_params() {
            self.ll_params.unwrap_or_default().validate()?;
        }
        if self.kind == StrategyKind::Qaoa && self.qaoa_p == Some(0) {
            return Err(Error::InvalidArgument("QAOA depth must be >= 1".into()));
        }
        if self.per_stage_max_iters.contains(&0) {
            return Err(Error::InvalidArgument("per-stage budgets must be >= 1".into()));
        }
        Ok(())
    }

    /// Short display name such as `SHA-NW4` or `SHA-NW2+LVQE`.
    pub fn label(&self) -> String {
        let sha = || {
            format!(
                "SHA-{}{}",
                self.partition_strategy.map_or("", PartitionStrategy::short),
                self.n_partitions.unwrap_or(0)
            )
        };
        match self.kind {
            StrategyKind::Svqe => "SVQE".into(),
            StrategyKind::Sha => sha(),
            StrategyKind::Ll => "LL".into(),
            StrategyKind::Lvqe => "LVQE".into(),
            StrategyKind::Qaoa => format!("QAOA-p{}", self.qaoa_p.unwrap_or(3)),
            StrategyKind::ShaLl => format!("{}+LL", sha()),
            StrategyKind::ShaLvqe => format!("{}+LVQE", sha()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub shots: Shots,
    /// Budget of a final full stage; subset stages share it evenly.
    pub max_iters: usize,
    pub coarse_threshold: f64,
    pub fine_threshold: f64,
    pub initial_step: f64,
    pub seed: u64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            shots: Shots::Count(200),
            max_iters: 4000,
            coarse_threshold: 0.8,
            fine_threshold: 1e-6,
            initial_step: 0.5,
            seed: 0,
        }
    }
}

/// A Hamiltonian term list plus, for coloring instances, the graph the
/// terms came from and the mask of proper colorings.
#[derive(Debug, Clone)]
pub struct Problem {
    pub id: String,
    pub terms: PauliSum,
    pub graph: Option<GraphInstance>,
    term_edge: Option<Vec<usize>>,
    proper: Option<Vec<bool>>,
}

impl Problem {
    pub fn from_graph(id: impl Into<String>, graph: GraphInstance) -> Result<Self> {
        let ColoringHamiltonian { sum, term_edge } = coloring_hamiltonian(&graph)?;
        let proper = graph.proper_mask()?;
        Ok(Self {
            id: id.into(),
            terms: sum,
            graph: Some(graph),
            term_edge: Some(term_edge),
            proper: Some(proper),
        })
    }

    pub fn from_hamiltonian(id: impl Into<String>, terms: PauliSum) -> Self {
        Self {
            id: id.into(),
            terms,
            graph: None,
            term_edge: None,
            proper: None,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.terms.n_qubits()
    }

    pub fn proper_mask(&self) -> Option<&[bool]> {
        self.proper.as_deref()
    }

    /// Builds the partition requested by a SHA-type spec.
    pub fn partition(&self, strategy: PartitionStrategy, m: usize, seed: u64) -> Result<Partition> {
        let n = self.terms.len();
        match strategy {
            PartitionStrategy::Random => partition_random(n, m, derive_seed(seed, &[PARTITION_TAG])),
            PartitionStrategy::Chronological => partition_chronological(n, m),
            PartitionStrategy::Nodewise => {
                let (graph, term_edge) = match (&self.graph, &self.term_edge) {
                    (Some(g), Some(t)) => (g, t),
                    _ => return Err(Error::InvalidArgument("nodewise partitioning needs a graph".into())),
                };
                nodewise_blocks(graph, term_edge, m)
            }
        }
    }
}

fn split_sizes(n: usize, m: usize) -> Result<Vec<usize>> {
    if m == 0 || m > n {
        return Err(Error::InvalidArgument(format!("{m} partitions for {n} items")));
    }
    let (base, extra) = (n / m, n % m);
    Ok((0..m).map(|i| base + usize::from(i < extra)).collect())
}

fn split_by_sizes(items: &[usize], sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(sizes.len());
    let mut start = 0;
    for &s in sizes {
        out.push(items[start..start + s].to_vec());
        start += s;
    }
    out
}

/// Seeded shuffle of `0..n_terms` cut into `m` near-equal blocks, larger
/// blocks first.
pub fn partition_random(n_terms: usize, m: usize, seed: u64) -> Result<Partition> {
    let sizes = split_sizes(n_terms, m)?;
    let mut idx: Vec<usize> = (0..n_terms).collect();
    idx.shuffle(&mut rng_from_seed(seed));
    Partition::new(split_by_sizes(&idx, &sizes), n_terms, false)
}

/// Contiguous blocks in input order, larger blocks first.
pub fn partition_chronological(n_terms: usize, m: usize) -> Result<Partition> {
    let sizes = split_sizes(n_terms, m)?;
    let idx: Vec<usize> = (0..n_terms).collect();
    Partition::new(split_by_sizes(&idx, &sizes), n_terms, false)
}

/// Nodes in breadth-first order from node 0, cut into `m` contiguous groups.
/// Block `j` holds every term of every edge incident to a node of group `j`,
/// so blocks overlap on edges between groups.
pub fn partition_nodewise(graph: &GraphInstance, h: &ColoringHamiltonian, m: usize) -> Result<Partition> {
    if h.term_edge.len() != h.sum.len() {
        return Err(Error::DimensionMismatch {
            expected: h.sum.len(),
            got: h.term_edge.len(),
        });
    }
    nodewise_blocks(graph, &h.term_edge, m)
}

fn nodewise_blocks(graph: &GraphInstance, term_edge: &[usize], m: usize) -> Result<Partition> {
    let order = bfs_order(graph);
    let sizes = split_sizes(order.len(), m)?;
    let groups = split_by_sizes(&order, &sizes);
    let edges = graph.edges();
    let mut labels = Vec::with_capacity(m);
    let blocks = groups
        .iter()
        .map(|group| {
            labels.push(
                group
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            );
            term_edge
                .iter()
                .enumerate()
                .filter(|&(_, &e)| {
                    let (a, b) = edges[e];
                    group.contains(&a) || group.contains(&b)
                })
                .map(|(t, _)| t)
                .collect()
        })
        .collect::<Vec<Vec<usize>>>();
    if let Some(j) = blocks.iter().position(Vec::is_empty) {
        return Err(Error::InvalidArgument(format!(
            "node group {} has no incident edges",
            j + 1
        )));
    }
    Partition::new(blocks, term_edge.len(), true)?.with_labels(labels)
}

/// Per-evaluation solution quality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricPoint {
    /// Exact probability mass on proper colorings.
    pub accuracy: f64,
    /// Modal bitstring: from the shots when sampling, else the most probable state.
    pub modal_index: usize,
    pub most_likely_correct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub label: String,
    /// Parameters of the stage circuit.
    pub n_params: usize,
    /// Slots the optimizer moved; all others are frozen.
    pub trainable: Vec<usize>,
    /// Indices into the problem's term list forming this stage's Hamiltonian.
    pub term_indices: Vec<usize>,
    pub threshold: f64,
    pub max_iters: usize,
    pub initial_params: Vec<f64>,
    pub final_params: Vec<f64>,
    /// Fidelity between the outputs with and without the newly added layer,
    /// both at the stage's initial parameters.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_fidelity: Option<f64>,
    pub result: OptimResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub strategy: StrategySpec,
    pub strategy_label: String,
    pub graph_id: String,
    pub architecture: String,
    pub seed: u64,
    pub stages: Vec<StageRecord>,
    pub final_params: Vec<f64>,
    pub total_iterations: usize,
    pub metric_trace: Vec<MetricPoint>,
    /// Exact accuracy of the final state, when the problem has a graph.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_accuracy: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

struct StagePlan<'c> {
    label: String,
    circuit: &'c Circuit,
    trainable: Vec<usize>,
    terms: Option<BTreeSet<usize>>,
    coarse: bool,
    max_iters: usize,
    start_fidelity: Option<f64>,
}

/// Runs stages in order, carrying the best parameters forward.
struct Runner<'p> {
    problem: &'p Problem,
    cfg: TrainingConfig,
    /// Parameters of the widest circuit seen so far; narrower stages read a prefix.
    params: Vec<f64>,
    stages: Vec<StageRecord>,
    trace: Vec<MetricPoint>,
}

impl<'p> Runner<'p> {
    fn new(problem: &'p Problem, cfg: TrainingConfig, initial: Vec<f64>) -> Self {
        Self {
            problem,
            cfg,
            params: initial,
            stages: Vec::new(),
            trace: Vec::new(),
        }
    }

    fn run(&mut self, plan: StagePlan<'_>) -> Result<()> {
        let n_params = plan.circuit.param_count();
        if self.params.len() < n_params {
            self.params.resize(n_params, 0.0);
        }
        let (h_stage, term_indices) = match &plan.terms {
            None => (self.problem.terms.clone(), (0..self.problem.terms.len()).collect()),
            Some(set) => (self.problem.terms.select(set)?, set.iter().copied().collect()),
        };
        let h_stage = h_stage.simplify();
        let stage_index = self.stages.len() as u64;
        let seeds = SeedPolicy::Fresh {
            master: derive_seed(self.cfg.seed, &[stage_index]),
        };
        let mut objective = Objective::new(plan.circuit, &h_stage, self.cfg.shots, seeds)?;
        let initial_params = self.params[..n_params].to_vec();
        let x0: Vec<f64> = plan.trainable.iter().map(|&s| initial_params[s]).collect();
        let threshold = if plan.coarse {
            self.cfg.coarse_threshold
        } else {
            self.cfg.fine_threshold
        };
        let opt = OptimConfig {
            max_iters: plan.max_iters,
            progress_threshold: threshold,
            initial_step: self.cfg.initial_step,
            seed: self.cfg.seed,
        };
        opt.validate()?;
        let proper = self.problem.proper.as_deref();
        let trace = &mut self.trace;
        let mut full = initial_params.clone();
        let trainable = &plan.trainable;
        let n_qubits = plan.circuit.n_qubits();
        let result = minimize(
            |x: &[f64]| {
                for (&s, &v) in trainable.iter().zip(x) {
                    full[s] = v;
                }
                let eval = objective.evaluate(&full);
                if let Some(proper) = proper {
                    let probs = eval.state.probabilities();
                    let accuracy = accuracy_from_probabilities(&probs, proper).expect("dimensions checked");
                    let modal = match &eval.samples {
                        Some(samples) => ShotHistogram::from_samples(n_qubits, samples).mode(),
                        None => modal_index(&probs),
                    }
                    .expect("non-empty distribution");
                    trace.push(MetricPoint {
                        accuracy,
                        modal_index: modal,
                        most_likely_correct: proper[modal],
                    });
                }
                eval.value
            },
            &x0,
            &opt,
        );
        let mut final_params = initial_params.clone();
        for (&s, &v) in plan.trainable.iter().zip(&result.best_params) {
            final_params[s] = v;
        }
        self.params[..n_params].copy_from_slice(&final_params);
        self.stages.push(StageRecord {
            label: plan.label,
            n_params,
            trainable: plan.trainable,
            term_indices,
            threshold,
            max_iters: plan.max_iters,
            initial_params,
            final_params,
            start_fidelity: plan.start_fidelity,
            result,
        });
        Ok(())
    }

    fn finish(self, strategy: StrategySpec, circuit: &Circuit, architecture: String, warnings: Vec<String>) -> Result<RunRecord> {
        let final_params = self.params[..circuit.param_count()].to_vec();
        let final_accuracy = match &self.problem.proper {
            Some(proper) => {
                let state = run_circuit(circuit, &final_params, &Statevector::zero(circuit.n_qubits())?)?;
                Some(accuracy_from_probabilities(&state.probabilities(), proper)?)
            }
            None => None,
        };
        Ok(RunRecord {
            strategy_label: strategy.label(),
            strategy,
            graph_id: self.problem.id.clone(),
            architecture,
            seed: self.cfg.seed,
            total_iterations: self.stages.iter().map(|s| s.result.iterations_used).sum(),
            stages: self.stages,
            final_params,
            metric_trace: self.trace,
            final_accuracy,
            warnings,
        })
    }
}

fn check_width(problem: &Problem, circuit: &Circuit) -> Result<()> {
    if problem.n_qubits() != circuit.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: problem.n_qubits(),
            got: circuit.n_qubits(),
        });
    }
    Ok(())
}

/// Budget of stage `j` of `total`: the explicit override when present, else
/// an even share of `max_iters` for subset stages and `max_iters` for a final one.
fn stage_budget(spec: &StrategySpec, cfg: &TrainingConfig, j: usize, total: usize, is_final: bool) -> usize {
    if let Some(&b) = spec.per_stage_max_iters.get(j) {
        return b;
    }
    if is_final {
        cfg.max_iters
    } else {
        (cfg.max_iters / total.max(1)).max(1)
    }
}

/// Plain VQE: all parameters from zero, one fine stage on the full Hamiltonian.
pub fn train_svqe(problem: &Problem, circuit: &Circuit, cfg: &TrainingConfig) -> Result<RunRecord> {
    check_width(problem, circuit)?;
    let spec = StrategySpec::svqe();
    let mut runner = Runner::new(problem, *cfg, vec![0.0; circuit.param_count()]);
    runner.run(StagePlan {
        label: "full".into(),
        circuit,
        trainable: (0..circuit.param_count()).collect(),
        terms: None,
        coarse: false,
        max_iters: stage_budget(&spec, cfg, 0, 1, true),
        start_fidelity: None,
    })?;
    runner.finish(spec, circuit, "custom".into(), Vec::new())
}

/// SHA: prefixes `1..M−1` of the partition at the coarse threshold, then the
/// full Hamiltonian at the fine threshold.
pub fn train_sha(problem: &Problem, circuit: &Circuit, partition: &Partition, cfg: &TrainingConfig) -> Result<RunRecord> {
    let spec = StrategySpec {
        partition_strategy: None,
        ..StrategySpec::sha(PartitionStrategy::Chronological, partition.len())
    };
    train_sha_spec(problem, circuit, partition, cfg, spec)
}

fn train_sha_spec(
    problem: &Problem,
    circuit: &Circuit,
    partition: &Partition,
    cfg: &TrainingConfig,
    spec: StrategySpec,
) -> Result<RunRecord> {
    check_width(problem, circuit)?;
    let m = partition.len();
    let all: Vec<usize> = (0..circuit.param_count()).collect();
    let mut runner = Runner::new(problem, *cfg, vec![0.0; circuit.param_count()]);
    for k in 1..=m {
        let last = k == m;
        runner.run(StagePlan {
            label: if last { "full".into() } else { format!("prefix {k}/{m}") },
            circuit,
            trainable: all.clone(),
            terms: if last { None } else { Some(partition.prefix_indices(k)?) },
            coarse: !last,
            max_iters: stage_budget(&spec, cfg, k - 1, m, last),
            start_fidelity: None,
        })?;
    }
    runner.finish(spec, circuit, "custom".into(), Vec::new())
}

/// Outer layer-growth stages shared by LL, Layer-VQE and the hybrids.
struct Growth {
    label: String,
    /// Layers of the stage circuit.
    depth: usize,
    trainable: Vec<usize>,
    /// Whether a new zero-initialised layer was appended for this stage.
    added_layer: bool,
}

fn ll_phase1(ranges: &[std::ops::Range<usize>], ll: &LlParams) -> Vec<Growth> {
    let total = ranges.len();
    let mut out = Vec::new();
    let mut depth = ll.s.min(total);
    loop {
        let lo = depth.saturating_sub(ll.q);
        out.push(Growth {
            label: format!("layers 1..{depth}"),
            depth,
            trainable: (ranges[lo].start..ranges[depth - 1].end).collect(),
            added_layer: depth > ll.s.min(total),
        });
        if depth == total {
            break;
        }
        depth = (depth + ll.p).min(total);
    }
    out
}

/// Phase-2 windows of `⌈r·L⌉` layers tiling the circuit; empty for `r = 0`.
fn ll_phase2(ranges: &[std::ops::Range<usize>], r: f64) -> Vec<Growth> {
    let total = ranges.len();
    let w = (r * total as f64).ceil() as usize;
    if w == 0 {
        return Vec::new();
    }
    (0..total)
        .step_by(w)
        .map(|lo| {
            let hi = (lo + w).min(total);
            Growth {
                label: format!("window {}..{}", lo + 1, hi),
                depth: total,
                trainable: (ranges[lo].start..ranges[hi - 1].end).collect(),
                added_layer: false,
            }
        })
        .collect()
}

fn lvqe_growth(ranges: &[std::ops::Range<usize>], merge_ry: bool) -> Vec<Growth> {
    let total = ranges.len();
    let mut out = Vec::new();
    let first = if merge_ry { 2 } else { 1 };
    for depth in first..=total {
        out.push(Growth {
            label: if depth == 1 { "ry layer".into() } else { format!("+layer {}", depth - 1) },
            depth,
            trainable: (0..ranges[depth - 1].end).collect(),
            added_layer: depth > 1,
        });
    }
    out
}

fn fidelity_with_new_layer(circuit: &Circuit, params: &[f64], depth: usize) -> Result<f64> {
    let before = circuit.prefix(depth - 1)?;
    let after = circuit.prefix(depth)?;
    let zero = Statevector::zero(circuit.n_qubits())?;
    let mut p_after = params[..after.param_count().min(params.len())].to_vec();
    p_after.resize(after.param_count(), 0.0);
    let a = run_circuit(&before, &p_after[..before.param_count()], &zero)?;
    let b = run_circuit(&after, &p_after, &zero)?;
    a.fidelity(&b)
}

/// Runs `outer` growth stages, each either as one coarse stage or, with a
/// partition, as a full SHA sweep; then `finals` at the fine threshold.
fn run_growth<'p>(
    problem: &'p Problem,
    circuit: &Circuit,
    outer: Vec<Growth>,
    finals: Vec<Growth>,
    partition: Option<&Partition>,
    spec: &StrategySpec,
    cfg: &TrainingConfig,
) -> Result<Runner<'p>> {
    check_width(problem, circuit)?;
    let prefixes: Vec<Circuit> = (0..=circuit.layers().len())
        .map(|k| circuit.prefix(k))
        .collect::<Result<_>>()?;
    let inner = partition.map_or(1, Partition::len);
    let total = outer.len() * inner + finals.len();
    let mut runner = Runner::new(problem, *cfg, vec![0.0; circuit.param_count()]);
    let mut j = 0;
    for g in outer {
        let start_fidelity = if g.added_layer {
            Some(fidelity_with_new_layer(circuit, &runner.params, g.depth)?)
        } else {
            None
        };
        for k in 1..=inner {
            let terms = match partition {
                Some(p) if k < inner => Some(p.prefix_indices(k)?),
                _ => None,
            };
            let label = match partition {
                Some(_) => format!("{} / prefix {k}/{inner}", g.label),
                None => g.label.clone(),
            };
            runner.run(StagePlan {
                label,
                circuit: &prefixes[g.depth],
                trainable: g.trainable.clone(),
                terms,
                coarse: true,
                max_iters: stage_budget(spec, cfg, j, total, false),
                start_fidelity: if k == 1 { start_fidelity } else { None },
            })?;
            j += 1;
        }
    }
    let n_finals = finals.len();
    for g in finals {
        runner.run(StagePlan {
            label: g.label,
            circuit: &prefixes[g.depth],
            trainable: g.trainable,
            terms: None,
            coarse: false,
            max_iters: spec
                .per_stage_max_iters
                .get(j)
                .copied()
                .unwrap_or((cfg.max_iters / n_finals.max(1)).max(1)),
            start_fidelity: None,
        })?;
        j += 1;
    }
    Ok(runner)
}

fn catalog_circuit(arch: ArchitectureId, n_qubits: usize, n_layers: usize) -> Result<Circuit> {
    if arch == ArchitectureId::Qaoa {
        return Err(Error::InvalidArgument("layerwise schedules need a catalog architecture".into()));
    }
    build_ansatz(arch, n_qubits, n_layers)
}

/// Layerwise Learning. Phase 1 grows the circuit from `s` layers by `p` at a
/// time, training only the last `q` layers at the coarse threshold. Phase 2
/// trains tiling windows of `⌈r·L⌉` layers over the full circuit at the fine
/// threshold (one window of everything when `r = 1`).
pub fn train_ll(problem: &Problem, arch: ArchitectureId, n_layers: usize, ll: &LlParams, cfg: &TrainingConfig) -> Result<RunRecord> {
    train_ll_inner(problem, arch, n_layers, ll, None, StrategySpec::ll(*ll), cfg)
}

fn train_ll_inner(
    problem: &Problem,
    arch: ArchitectureId,
    n_layers: usize,
    ll: &LlParams,
    partition: Option<&Partition>,
    spec: StrategySpec,
    cfg: &TrainingConfig,
) -> Result<RunRecord> {
    ll.validate()?;
    let circuit = catalog_circuit(arch, problem.n_qubits(), n_layers)?;
    let ranges = circuit.layer_slot_ranges()?;
    let outer = ll_phase1(&ranges, ll);
    let finals = ll_phase2(&ranges, ll.r);
    let runner = run_growth(problem, &circuit, outer, finals, partition, &spec, cfg)?;
    runner.finish(spec, &circuit, arch.to_string(), Vec::new())
}

/// Layer-VQE: an RY layer, then one zero-initialised layer at a time with all
/// parameters trained at the coarse threshold, then a fine full stage.
pub fn train_lvqe(problem: &Problem, arch: ArchitectureId, n_layers: usize, cfg: &TrainingConfig) -> Result<RunRecord> {
    train_lvqe_inner(problem, arch, n_layers, None, StrategySpec::lvqe(), cfg)
}

fn train_lvqe_inner(
    problem: &Problem,
    arch: ArchitectureId,
    n_layers: usize,
    partition: Option<&Partition>,
    spec: StrategySpec,
    cfg: &TrainingConfig,
) -> Result<RunRecord> {
    let n = problem.n_qubits();
    let circuit = ry_layer(n)?.then(&catalog_circuit(arch, n, n_layers)?)?;
    let mut warnings = Vec::new();
    if !arch.identity_at_zero() {
        warnings.push(format!("{arch} layers are not the identity at zero; added layers change the state"));
    }
    let ranges = circuit.layer_slot_ranges()?;
    let outer = lvqe_growth(&ranges, partition.is_some());
    let last = circuit.layers().len();
    let finals = vec![Growth {
        label: "full".into(),
        depth: last,
        trainable: (0..circuit.param_count()).collect(),
        added_layer: false,
    }];
    let runner = run_growth(problem, &circuit, outer, finals, partition, &spec, cfg)?;
    runner.finish(spec, &circuit, arch.to_string(), warnings)
}

/// QAOA of depth `p` from the constant-speed schedule, one fine stage.
pub fn train_qaoa(problem: &Problem, p: usize, cfg: &TrainingConfig) -> Result<RunRecord> {
    let circuit = build_qaoa(&problem.terms.simplify(), p)?;
    let spec = StrategySpec::qaoa(p);
    let mut runner = Runner::new(problem, *cfg, constant_speed_init(p));
    runner.run(StagePlan {
        label: "full".into(),
        circuit: &circuit,
        trainable: (0..circuit.param_count()).collect(),
        terms: None,
        coarse: false,
        max_iters: stage_budget(&spec, cfg, 0, 1, true),
        start_fidelity: None,
    })?;
    runner.finish(spec, &circuit, ArchitectureId::Qaoa.to_string(), Vec::new())
}

/// SHA hybrids: the LL or Layer-VQE outer schedule with every per-layer
/// stage replaced by a SHA sweep over the partition, then a fine full stage.
/// For Layer-VQE the RY layer is trained together with the first layer, so
/// the run has `L·M + 1` stages.
pub fn train_hybrid(
    problem: &Problem,
    kind: StrategyKind,
    arch: ArchitectureId,
    n_layers: usize,
    partition: &Partition,
    ll: &LlParams,
    cfg: &TrainingConfig,
) -> Result<RunRecord> {
    let m = partition.len();
    match kind {
        StrategyKind::ShaLl => train_ll_inner(
            problem,
            arch,
            n_layers,
            ll,
            Some(partition),
            StrategySpec {
                partition_strategy: None,
                ..StrategySpec::sha_ll(PartitionStrategy::Chronological, m, *ll)
            },
            cfg,
        ),
        StrategyKind::ShaLvqe => train_lvqe_inner(
            problem,
            arch,
            n_layers,
            Some(partition),
            StrategySpec {
                partition_strategy: None,
                ..StrategySpec::sha_lvqe(PartitionStrategy::Chronological, m)
            },
            cfg,
        ),
        other => Err(Error::InvalidArgument(format!("{other} is not a hybrid strategy"))),
    }
}

/// Runs `spec` on `problem` with the given architecture (ignored for QAOA).
pub fn run_strategy(
    spec: &StrategySpec,
    problem: &Problem,
    arch: ArchitectureId,
    n_layers: usize,
    cfg: &TrainingConfig,
) -> Result<RunRecord> {
    spec.validate()?;
    let partition = match (spec.partition_strategy, spec.n_partitions) {
        (Some(ps), Some(m)) if spec.kind.uses_partition() => Some(problem.partition(ps, m, cfg.seed)?),
        _ => None,
    };
    let ll = spec.ll_params.unwrap_or_default();
    let n = problem.n_qubits();
    let mut record = match spec.kind {
        StrategyKind::Svqe => {
            let c = catalog_circuit(arch, n, n_layers)?;
            train_svqe_spec(problem, &c, cfg, spec.clone())?
        }
        StrategyKind::Sha => {
            let c = catalog_circuit(arch, n, n_layers)?;
            train_sha_spec(problem, &c, partition.as_ref().expect("validated"), cfg, spec.clone())?
        }
        StrategyKind::Ll => train_ll_inner(problem, arch, n_layers, &ll, None, spec.clone(), cfg)?,
        StrategyKind::Lvqe => train_lvqe_inner(problem, arch, n_layers, None, spec.clone(), cfg)?,
        StrategyKind::Qaoa => {
            let mut r = train_qaoa(problem, spec.qaoa_p.unwrap_or(3), cfg)?;
            r.strategy = spec.clone();
            r.strategy_label = spec.label();
            return Ok(r);
        }
        StrategyKind::ShaLl => {
            train_ll_inner(problem, arch, n_layers, &ll, partition.as_ref(), spec.clone(), cfg)?
        }
        StrategyKind::ShaLvqe => train_lvqe_inner(problem, arch, n_layers, partition.as_ref(), spec.clone(), cfg)?,
    };
    record.architecture = arch.to_string();
    Ok(record)
}

/// Rebuilds the circuit a dispatched record's final parameters belong to.
pub fn final_circuit(record: &RunRecord, problem: &Problem, n_layers: usize) -> Result<Circuit> {
    let n = problem.n_qubits();
    if record.strategy.kind == StrategyKind::Qaoa {
        return build_qaoa(&problem.terms.simplify(), record.strategy.qaoa_p.unwrap_or(3));
    }
    let arch: ArchitectureId = record.architecture.parse()?;
    match record.strategy.kind {
        StrategyKind::Lvqe | StrategyKind::ShaLvqe => ry_layer(n)?.then(&catalog_circuit(arch, n, n_layers)?),
        _ => catalog_circuit(arch, n, n_layers),
    }
}

fn train_svqe_spec(problem: &Problem, circuit: &Circuit, cfg: &TrainingConfig, spec: StrategySpec) -> Result<RunRecord> {
    let mut r = train_svqe(problem, circuit, cfg)?;
    r.strategy_label = spec.label();
    r.strategy = spec;
    Ok(r)
}
