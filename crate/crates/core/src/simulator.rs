//! Dense statevector simulation.
//!
//! Qubit `q` is bit `q` of the basis-state index (little-endian). Gates are
//! applied with strided in-place updates; no operator matrix larger than 2x2
//! is ever materialised.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::ansatz::Circuit;
use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, SimRng};

/// Hard cap on register width for the dense representation.
pub const MAX_QUBITS: usize = 24;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    H,
    X,
    Cnot,
    Crz,
    Crx,
    Rzz,
    /// `exp(-i θ/2 · Z⊗…⊗Z)` over the listed qubits.
    MultiZPhase,
}

impl GateKind {
    pub fn is_rotation(self) -> bool {
        !matches!(self, GateKind::H | GateKind::X | GateKind::Cnot)
    }

    fn arity(self) -> Option<usize> {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::H | GateKind::X => Some(1),
            GateKind::Cnot | GateKind::Crz | GateKind::Crx | GateKind::Rzz => Some(2),
            GateKind::MultiZPhase => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Cnot => "CNOT",
            GateKind::Crz => "CRZ",
            GateKind::Crx => "CRX",
            GateKind::Rzz => "RZZ",
            GateKind::MultiZPhase => "MZ",
        }
    }
}

/// Where a rotation gate takes its angle from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    /// `scale * params[slot]`.
    Slot { slot: usize, scale: f64 },
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    /// For controlled gates the control comes first.
    pub qubits: Vec<usize>,
    pub angle: Option<Angle>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>, angle: Option<Angle>) -> Result<Self> {
        if let Some(a) = kind.arity() {
            if qubits.len() != a {
                return Err(Error::InvalidGate(format!(
                    "{} takes {a} qubits, got {}",
                    kind.name(),
                    qubits.len()
                )));
            }
        } else if qubits.is_empty() {
            return Err(Error::InvalidGate("MZ needs at least one qubit".into()));
        }
        for (i, q) in qubits.iter().enumerate() {
            if qubits[..i].contains(q) {
                return Err(Error::InvalidGate(format!("repeated qubit {q}")));
            }
        }
        if kind.is_rotation() != angle.is_some() {
            return Err(Error::InvalidGate(format!(
                "{} {} an angle",
                kind.name(),
                if kind.is_rotation() { "requires" } else { "takes no" }
            )));
        }
        Ok(Self {
            kind,
            qubits,
            angle,
        })
    }

    pub fn fixed(kind: GateKind, qubits: Vec<usize>) -> Result<Self> {
        Self::new(kind, qubits, None)
    }

    pub fn slotted(kind: GateKind, qubits: Vec<usize>, slot: usize) -> Result<Self> {
        Self::new(kind, qubits, Some(Angle::Slot { slot, scale: 1.0 }))
    }

    pub fn slot(&self) -> Option<usize> {
        match self.angle {
            Some(Angle::Slot { slot, .. }) => Some(slot),
            _ => None,
        }
    }

    /// Resolves the rotation angle against a full parameter vector.
    pub fn resolve_angle(&self, params: &[f64]) -> Option<f64> {
        match self.angle? {
            Angle::Slot { slot, scale } => Some(scale * params[slot]),
            Angle::Fixed(a) => Some(a),
        }
    }

    pub fn with_slot_offset(mut self, delta: usize) -> Self {
        if let Some(Angle::Slot { slot, scale }) = self.angle {
            self.angle = Some(Angle::Slot {
                slot: slot + delta,
                scale,
            });
        }
        self
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.name())?;
        for q in &self.qubits {
            write!(f, " q{q}")?;
        }
        match self.angle {
            Some(Angle::Slot { slot, scale }) if scale == 1.0 => write!(f, " slot{slot}"),
            Some(Angle::Slot { slot, scale }) => write!(f, " slot{slot}*{scale:?}"),
            Some(Angle::Fixed(a)) => write!(f, " {a:?}"),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0…0⟩` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidArgument("register needs at least one qubit".into()));
        }
        if n_qubits > MAX_QUBITS {
            return Err(Error::ResourceLimit {
                what: "statevector",
                requested: n_qubits,
                cap: MAX_QUBITS,
            });
        }
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[0] = ONE;
        Ok(Self { n_qubits, amps })
    }

    /// Wraps raw amplitudes. The length must be a power of two; the vector is
    /// renormalised.
    pub fn from_amplitudes(mut amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::ResourceLimit {
                what: "statevector",
                requested: n_qubits,
                cap: MAX_QUBITS,
            });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidArgument("zero or non-finite state".into()));
        }
        for a in &mut amps {
            *a /= norm;
        }
        Ok(Self { n_qubits, amps })
    }

    /// Equal superposition over all basis states.
    pub fn uniform(n_qubits: usize) -> Result<Self> {
        let mut s = Self::zero(n_qubits)?;
        let a = Complex64::new((s.amps.len() as f64).sqrt().recip(), 0.0);
        s.amps.iter_mut().for_each(|x| *x = a);
        Ok(s)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let mut s = Self::zero(n_qubits)?;
        if index >= s.amps.len() {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range"
            )));
        }
        s.amps[0] = ZERO;
        s.amps[index] = ONE;
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Statevector) -> Result<f64> {
        self.check_dim(other.n_qubits)?;
        let overlap: Complex64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(overlap.norm_sqr())
    }

    pub(crate) fn check_dim(&self, n_qubits: usize) -> Result<()> {
        if self.n_qubits != n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                got: n_qubits,
            });
        }
        Ok(())
    }

    /// Applies `gate`. `angle` carries the raw parameter value for slotted
    /// gates (the gate's scale is applied here) and must be `None` otherwise.
    pub fn apply_gate(&mut self, gate: &Gate, angle: Option<f64>) -> Result<()> {
        for &q in &gate.qubits {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange {
                    qubit: q,
                    n_qubits: self.n_qubits,
                });
            }
        }
        let theta = match (gate.angle, angle) {
            (Some(Angle::Slot { scale, .. }), Some(a)) => Some(scale * a),
            (Some(Angle::Fixed(a)), None) => Some(a),
            (None, None) => None,
            (Some(Angle::Slot { slot, .. }), None) => {
                return Err(Error::InvalidGate(format!(
                    "{gate}: no value supplied for slot {slot}"
                )))
            }
            (_, Some(_)) => {
                return Err(Error::InvalidGate(format!(
                    "{gate}: angle supplied for a gate without a parameter slot"
                )))
            }
        };
        self.apply_resolved(gate, theta.unwrap_or(0.0));
        Ok(())
    }

    /// Applies a gate whose qubits are already known to be in range.
    pub(crate) fn apply_resolved(&mut self, gate: &Gate, theta: f64) {
        let q = &gate.qubits;
        match gate.kind {
            GateKind::Rx => self.apply_1q(q[0], rx(theta), None),
            GateKind::Ry => self.apply_1q(q[0], ry(theta), None),
            GateKind::Rz => self.apply_z_phase(1 << q[0], None, theta),
            GateKind::H => {
                let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
                self.apply_1q(q[0], [[h, h], [h, -h]], None)
            }
            GateKind::X => self.apply_1q(q[0], [[ZERO, ONE], [ONE, ZERO]], None),
            GateKind::Cnot => self.apply_1q(q[1], [[ZERO, ONE], [ONE, ZERO]], Some(q[0])),
            GateKind::Crx => self.apply_1q(q[1], rx(theta), Some(q[0])),
            GateKind::Crz => self.apply_z_phase(1 << q[1], Some(q[0]), theta),
            GateKind::Rzz | GateKind::MultiZPhase => {
                let mask = q.iter().fold(0usize, |m, &b| m | (1 << b));
                self.apply_z_phase(mask, None, theta)
            }
        }
    }

    fn apply_1q(&mut self, target: usize, m: [[Complex64; 2]; 2], control: Option<usize>) {
        let stride = 1usize << target;
        let cmask = control.map_or(0, |c| 1usize << c);
        let len = self.amps.len();
        let mut base = 0;
        while base < len {
            for i in base..base + stride {
                if i & cmask != cmask {
                    continue;
                }
                let j = i | stride;
                let (a, b) = (self.amps[i], self.amps[j]);
                self.amps[i] = m[0][0] * a + m[0][1] * b;
                self.amps[j] = m[1][0] * a + m[1][1] * b;
            }
            base += stride << 1;
        }
    }

    /// Multiplies each amplitude by `exp(-i θ/2 · z)` where `z = ±1` is the
    /// parity of the bits under `mask`; amplitudes whose control bit is clear
    /// are untouched.
    fn apply_z_phase(&mut self, mask: usize, control: Option<usize>, theta: f64) {
        let minus = Complex64::from_polar(1.0, -theta / 2.0);
        let plus = minus.conj();
        let cmask = control.map_or(0, |c| 1usize << c);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & cmask != cmask {
                continue;
            }
            *a *= if (i & mask).count_ones() % 2 == 0 {
                minus
            } else {
                plus
            };
        }
    }

    /// Born-rule probabilities, index-aligned with the amplitudes.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Draws `shots` basis-state samples. Deterministic in `(state, shots, seed)`.
    pub fn sample_shots(&self, shots: usize, seed: u64) -> Result<ShotHistogram> {
        if shots == 0 {
            return Err(Error::InvalidArgument("shots must be >= 1".into()));
        }
        let mut rng = rng_from_seed(seed);
        let samples = sample_indices(&self.probabilities(), shots, &mut rng);
        Ok(ShotHistogram::from_samples(self.n_qubits, &samples))
    }
}

pub fn rx(theta: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    let c = Complex64::new(c, 0.0);
    let mis = Complex64::new(0.0, -s);
    [[c, mis], [mis, c]]
}

pub fn ry(theta: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ]
}

/// Inverse-CDF sampling: one uniform `f64` in `[0, 1)` per shot from `rng`,
/// located by binary search in the cumulative distribution.
pub fn sample_indices(probs: &[f64], shots: usize, rng: &mut SimRng) -> Vec<usize> {
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p;
        cdf.push(acc);
    }
    let last_support = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    (0..shots)
        .map(|_| {
            let u: f64 = rng.random::<f64>() * acc;
            cdf.partition_point(|&c| c <= u).min(last_support)
        })
        .collect()
}

/// Measurement counts keyed by basis-state index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotHistogram {
    n_qubits: usize,
    counts: BTreeMap<usize, u64>,
    total_shots: u64,
}

impl ShotHistogram {
    pub fn from_samples(n_qubits: usize, samples: &[usize]) -> Self {
        let mut counts = BTreeMap::new();
        for &s in samples {
            *counts.entry(s).or_insert(0) += 1;
        }
        Self {
            n_qubits,
            counts,
            total_shots: samples.len() as u64,
        }
    }

    pub fn from_counts(n_qubits: usize, counts: BTreeMap<usize, u64>) -> Self {
        let total_shots = counts.values().sum();
        Self {
            n_qubits,
            counts,
            total_shots,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn total_shots(&self) -> u64 {
        self.total_shots
    }

    pub fn count(&self, index: usize) -> u64 {
        self.counts.get(&index).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }

    /// Most frequent outcome; ties go to the lowest index.
    pub fn mode(&self) -> Option<usize> {
        let mut best: Option<(usize, u64)> = None;
        for (&k, &v) in &self.counts {
            if best.map_or(true, |(_, bv)| v > bv) {
                best = Some((k, v));
            }
        }
        best.map(|(k, _)| k)
    }

    /// Counts keyed by bitstring, qubit 0 leftmost.
    pub fn by_bitstring(&self) -> BTreeMap<String, u64> {
        self.counts
            .iter()
            .map(|(&k, &v)| (bitstring(k, self.n_qubits), v))
            .collect()
    }
}

/// Renders a basis index with qubit 0 as the leftmost character.
pub fn bitstring(index: usize, n_qubits: usize) -> String {
    (0..n_qubits)
        .map(|q| if index >> q & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Runs `circuit` on a copy of `initial`.
pub fn run_circuit(circuit: &Circuit, params: &[f64], initial: &Statevector) -> Result<Statevector> {
    let mut state = initial.clone();
    run_circuit_in_place(circuit, params, &mut state)?;
    Ok(state)
}

pub fn run_circuit_in_place(circuit: &Circuit, params: &[f64], state: &mut Statevector) -> Result<()> {
    if params.len() != circuit.param_count() {
        return Err(Error::ParamCountMismatch {
            expected: circuit.param_count(),
            got: params.len(),
        });
    }
    state.check_dim(circuit.n_qubits())?;
    // Gates were range-checked when the circuit was built.
    for gate in circuit.gates() {
        let theta = gate.resolve_angle(params).unwrap_or(0.0);
        state.apply_resolved(gate, theta);
    }
    Ok(())
}
