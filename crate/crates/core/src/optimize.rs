//! Derivative-free minimisation of (shot-noisy) circuit objectives, plus the
//! two-point parameter-shift gradient used to verify circuits.
//!
//! [`minimize`] is an unconstrained linear-interpolation trust-region method in
//! the style of COBYLA: it keeps a simplex of `n + 1` evaluated points, fits
//! the linear model through them, steps a distance `ρ` down the model
//! gradient from the best vertex, and halves `ρ` when a step fails on a
//! well-shaped simplex. It stops when `ρ` would drop below the progress
//! threshold or when the evaluation budget is spent. `ρ` never grows.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::Circuit;
use crate::error::{Error, Result};
use crate::pauli::{expectation_exact, expectation_shots, PauliSum};
use crate::rng::{derive_seed, rng_from_seed};
use crate::simulator::{run_circuit_in_place, sample_indices, GateKind, Statevector};

/// Simplex edges longer than `FAR · ρ` trigger a geometry step.
const FAR: f64 = 2.1;
/// Vertices closer than `FLAT · ρ` to the opposite face trigger a geometry step.
const FLAT: f64 = 0.25;
/// Length of a geometry step, in units of `ρ`.
const GEOMETRY_STEP: f64 = 0.5;
/// Trust-region steps achieving less than this fraction of the predicted
/// decrease count as failures.
const ACCEPT_RATIO: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimConfig {
    /// Objective-evaluation budget.
    pub max_iters: usize,
    /// Final trust radius.
    pub progress_threshold: f64,
    /// Initial trust radius (radians).
    pub initial_step: f64,
    pub seed: u64,
}

impl Default for OptimConfig {
    fn default() -> Self {
        Self {
            max_iters: 4000,
            progress_threshold: 1e-6,
            initial_step: 0.5,
            seed: 0,
        }
    }
}

impl OptimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be >= 1".into()));
        }
        if !(self.progress_threshold >= 0.0) {
            return Err(Error::InvalidArgument("progress_threshold must be >= 0".into()));
        }
        if !(self.initial_step > 0.0) {
            return Err(Error::InvalidArgument("initial_step must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    RadiusConverged,
    Budget,
    ZeroDimension,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimResult {
    pub best_params: Vec<f64>,
    pub best_value: f64,
    pub iterations_used: usize,
    /// `(iteration, objective value)`, iterations counted from 1.
    pub trajectory: Vec<(usize, f64)>,
    pub final_radius: f64,
    pub stop: StopReason,
}

struct Budgeted<F> {
    f: F,
    max: usize,
    trajectory: Vec<(usize, f64)>,
}

impl<F: FnMut(&[f64]) -> f64> Budgeted<F> {
    fn exhausted(&self) -> bool {
        self.trajectory.len() >= self.max
    }

    fn eval(&mut self, x: &[f64]) -> f64 {
        let v = (self.f)(x);
        self.trajectory.push((self.trajectory.len() + 1, v));
        v
    }
}

struct Simplex {
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
}

impl Simplex {
    fn best(&self) -> usize {
        let mut b = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v < self.values[b] {
                b = i;
            }
        }
        b
    }
}

/// Linear model about the best vertex: gradient, per-vertex edge lengths and
/// the inverse of the edge matrix (columns `a_j` with `d_i · a_j = δ_ij`).
struct Model {
    others: Vec<usize>,
    grad: DVector<f64>,
    inv: DMatrix<f64>,
    dist: Vec<f64>,
}

fn fit_model(s: &Simplex, best: usize) -> Option<Model> {
    let n = s.points[0].len();
    let others: Vec<usize> = (0..s.points.len()).filter(|&j| j != best).collect();
    let x0 = &s.points[best];
    let d = DMatrix::from_fn(n, n, |r, c| s.points[others[r]][c] - x0[c]);
    let df = DVector::from_fn(n, |r, _| s.values[others[r]] - s.values[best]);
    let inv = d.clone().try_inverse()?;
    let grad = &inv * df;
    if grad.iter().any(|g| !g.is_finite()) {
        return None;
    }
    let dist = (0..n).map(|r| d.row(r).norm()).collect();
    Some(Model {
        others,
        grad,
        inv,
        dist,
    })
}

/// Minimises `objective` from `x0`. Every evaluation counts as one iteration.
pub fn minimize<F>(objective: F, x0: &[f64], cfg: &OptimConfig) -> OptimResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut obj = Budgeted {
        f: objective,
        max: cfg.max_iters.max(1),
        trajectory: Vec::new(),
    };
    let f0 = obj.eval(x0);
    if n == 0 {
        return OptimResult {
            best_params: x0.to_vec(),
            best_value: f0,
            iterations_used: 1,
            trajectory: obj.trajectory,
            final_radius: 0.0,
            stop: StopReason::ZeroDimension,
        };
    }
    let mut rho = cfg.initial_step;
    let rho_end = cfg.progress_threshold.min(rho);

    let mut s = Simplex {
        points: vec![x0.to_vec()],
        values: vec![f0],
    };
    let mut stop = StopReason::Budget;
    for i in 0..n {
        if obj.exhausted() {
            return finish(s, obj.trajectory, rho, StopReason::Budget);
        }
        let mut x = x0.to_vec();
        x[i] += rho;
        let v = obj.eval(&x);
        s.points.push(x);
        s.values.push(v);
    }

    let mut last_step_failed = false;
    loop {
        if obj.exhausted() {
            break;
        }
        let best = s.best();
        let model = match fit_model(&s, best) {
            Some(m) => m,
            None => {
                // Degenerate simplex: rebuild the coordinate simplex around the best point.
                let centre = s.points[best].clone();
                let fc = s.values[best];
                s.points = vec![centre.clone()];
                s.values = vec![fc];
                for i in 0..n {
                    if obj.exhausted() {
                        return finish(s, obj.trajectory, rho, StopReason::Budget);
                    }
                    let mut x = centre.clone();
                    x[i] += rho;
                    let v = obj.eval(&x);
                    s.points.push(x);
                    s.values.push(v);
                }
                continue;
            }
        };

        if last_step_failed {
            last_step_failed = false;
            // Distance of each vertex to the face spanned by the others.
            let sigma: Vec<f64> = (0..n).map(|j| 1.0 / model.inv.column(j).norm()).collect();
            let far = (0..n).max_by(|&a, &b| model.dist[a].total_cmp(&model.dist[b])).unwrap();
            let flat = (0..n).min_by(|&a, &b| sigma[a].total_cmp(&sigma[b])).unwrap();
            let target = if model.dist[far] > FAR * rho {
                Some(far)
            } else if sigma[flat] < FLAT * rho {
                Some(flat)
            } else {
                None
            };
            match target {
                Some(j) => {
                    let a = model.inv.column(j);
                    let mut dir = a.clone_owned() / a.norm();
                    if dir.dot(&model.grad) > 0.0 {
                        dir = -dir;
                    }
                    let x: Vec<f64> = s.points[best]
                        .iter()
                        .zip(dir.iter())
                        .map(|(xi, di)| xi + GEOMETRY_STEP * rho * di)
                        .collect();
                    let v = obj.eval(&x);
                    let slot = model.others[j];
                    s.points[slot] = x;
                    s.values[slot] = v;
                    continue;
                }
                None => {
                    if rho <= rho_end {
                        stop = StopReason::RadiusConverged;
                        break;
                    }
                    rho = reduce_radius(rho, rho_end);
                    continue;
                }
            }
        }

        let gnorm = model.grad.norm();
        if !(gnorm > f64::MIN_POSITIVE) {
            // Flat model: no descent direction at this radius.
            last_step_failed = true;
            continue;
        }
        let step = -(rho / gnorm) * &model.grad;
        let x: Vec<f64> = s.points[best].iter().zip(step.iter()).map(|(a, b)| a + b).collect();
        let v = obj.eval(&x);
        let predicted = rho * gnorm;
        let ratio = (s.values[best] - v) / predicted;

        // Barycentric weights of the step w.r.t. the edges; replacing vertex j
        // scales the simplex volume by |λ_j|.
        let lambda = model.inv.transpose() * &step;
        let j = (0..n)
            .max_by(|&a, &b| {
                let sa = lambda[a].abs() * model.dist[a].max(rho);
                let sb = lambda[b].abs() * model.dist[b].max(rho);
                sa.total_cmp(&sb)
            })
            .unwrap();
        let slot = model.others[j];
        s.points[slot] = x;
        s.values[slot] = v;
        if !(ratio >= ACCEPT_RATIO) {
            last_step_failed = true;
        }
    }
    finish(s, obj.trajectory, rho, stop)
}

fn reduce_radius(rho: f64, rho_end: f64) -> f64 {
    let r = 0.5 * rho;
    if r <= 1.5 * rho_end {
        rho_end
    } else {
        r
    }
}

fn finish(s: Simplex, trajectory: Vec<(usize, f64)>, rho: f64, stop: StopReason) -> OptimResult {
    let best = s.best();
    OptimResult {
        best_params: s.points[best].clone(),
        best_value: s.values[best],
        iterations_used: trajectory.len(),
        trajectory,
        final_radius: rho,
        stop,
    }
}

/// How the objective estimates the expectation value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shots {
    Exact,
    Count(usize),
}

/// Sampling seed used by each objective call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedPolicy {
    /// Every call samples with the same seed.
    Fixed(u64),
    /// Call `c` (from 0) samples with `derive_seed(master, [c])`.
    Fresh { master: u64 },
}

/// One objective evaluation: value, output state and the raw shot samples.
pub struct Evaluation {
    pub value: f64,
    pub state: Statevector,
    pub samples: Option<Vec<usize>>,
}

/// `params ↦ ⟨0|U†(θ) H U(θ)|0⟩`, exact or estimated from shots.
pub struct Objective<'a> {
    circuit: &'a Circuit,
    hamiltonian: &'a PauliSum,
    diagonal: Option<Vec<f64>>,
    shots: Shots,
    seeds: SeedPolicy,
    calls: u64,
    zero: Statevector,
}

impl<'a> Objective<'a> {
    pub fn new(circuit: &'a Circuit, hamiltonian: &'a PauliSum, shots: Shots, seeds: SeedPolicy) -> Result<Self> {
        if circuit.n_qubits() != hamiltonian.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: circuit.n_qubits(),
                got: hamiltonian.n_qubits(),
            });
        }
        if shots == Shots::Count(0) {
            return Err(Error::InvalidArgument("shots must be >= 1".into()));
        }
        let diagonal = if hamiltonian.is_diagonal() {
            Some(hamiltonian.diagonal()?)
        } else {
            None
        };
        Ok(Self {
            circuit,
            hamiltonian,
            diagonal,
            shots,
            seeds,
            calls: 0,
            zero: Statevector::zero(circuit.n_qubits())?,
        })
    }

    pub fn calls(&self) -> u64 {
        self.calls
    }

    fn next_seed(&mut self) -> u64 {
        let c = self.calls;
        self.calls += 1;
        match self.seeds {
            SeedPolicy::Fixed(s) => s,
            SeedPolicy::Fresh { master } => derive_seed(master, &[c]),
        }
    }

    /// Panics if `params` does not match the circuit's parameter count.
    pub fn evaluate(&mut self, params: &[f64]) -> Evaluation {
        let mut state = self.zero.clone();
        run_circuit_in_place(self.circuit, params, &mut state)
            .expect("objective parameters must match the circuit");
        let seed = self.next_seed();
        match (self.shots, &self.diagonal) {
            (Shots::Exact, Some(diag)) => {
                let value = state.probabilities().iter().zip(diag).map(|(p, d)| p * d).sum();
                Evaluation {
                    value,
                    state,
                    samples: None,
                }
            }
            (Shots::Exact, None) => Evaluation {
                value: expectation_exact(&state, self.hamiltonian).expect("dimensions checked"),
                state,
                samples: None,
            },
            (Shots::Count(shots), Some(diag)) => {
                let mut rng = rng_from_seed(seed);
                let samples = sample_indices(&state.probabilities(), shots, &mut rng);
                let value = samples.iter().map(|&b| diag[b]).sum::<f64>() / shots as f64;
                Evaluation {
                    value,
                    state,
                    samples: Some(samples),
                }
            }
            (Shots::Count(shots), None) => Evaluation {
                value: expectation_shots(&state, self.hamiltonian, shots, seed).expect("dimensions checked"),
                state,
                samples: None,
            },
        }
    }

    pub fn value(&mut self, params: &[f64]) -> f64 {
        self.evaluate(params).value
    }
}

/// Closure form of [`Objective`].
pub fn make_objective<'a>(
    circuit: &'a Circuit,
    hamiltonian: &'a PauliSum,
    shots: Shots,
    seeds: SeedPolicy,
) -> Result<impl FnMut(&[f64]) -> f64 + 'a> {
    let mut obj = Objective::new(circuit, hamiltonian, shots, seeds)?;
    Ok(move |p: &[f64]| obj.value(p))
}

/// Two-point parameter-shift gradient of the exact expectation.
///
/// Rotations are `exp(-iθ/2·P)`, so for a slot read by exactly one gate with
/// unit scale and a Pauli-string generator (RX, RY, RZ, RZZ, MZ),
/// `∂E/∂θ_i = (E(θ + π/2·e_i) − E(θ − π/2·e_i)) / 2` holds exactly.
/// Unmasked components are returned as 0.
pub fn parameter_shift_gradient(
    circuit: &Circuit,
    hamiltonian: &PauliSum,
    params: &[f64],
    mask: &[bool],
) -> Result<Vec<f64>> {
    let p = circuit.param_count();
    if params.len() != p {
        return Err(Error::ParamCountMismatch {
            expected: p,
            got: params.len(),
        });
    }
    if mask.len() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            got: mask.len(),
        });
    }
    let uses = circuit.slot_uses();
    for gate in circuit.gates() {
        if let Some(slot) = gate.slot() {
            if !mask[slot] {
                continue;
            }
            let pauli_generator = matches!(
                gate.kind,
                GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::Rzz | GateKind::MultiZPhase
            );
            let unit = matches!(gate.angle, Some(crate::simulator::Angle::Slot { scale, .. }) if scale == 1.0);
            if !pauli_generator || !unit || uses[slot] != 1 {
                return Err(Error::NotShiftCompatible(slot));
            }
        }
    }
    let energy = |theta: &[f64]| -> Result<f64> {
        let mut s = Statevector::zero(circuit.n_qubits())?;
        run_circuit_in_place(circuit, theta, &mut s)?;
        expectation_exact(&s, hamiltonian)
    };
    (0..p)
        .into_par_iter()
        .map(|i| {
            if !mask[i] {
                return Ok(0.0);
            }
            let mut plus = params.to_vec();
            let mut minus = params.to_vec();
            plus[i] += std::f64::consts::FRAC_PI_2;
            minus[i] -= std::f64::consts::FRAC_PI_2;
            Ok((energy(&plus)? - energy(&minus)?) / 2.0)
        })
        .collect()
}
