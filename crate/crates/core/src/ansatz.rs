//! Layered parameterized circuits: the architecture catalog and QAOA.
//!
//! Catalog interpretation of the survey circuit ids (not a gate-for-gate
//! reproduction of the survey diagrams). Per layer, on `n` qubits:
//!
//! | id  | gates                                                   | params      | identity at 0 |
//! |-----|---------------------------------------------------------|-------------|---------------|
//! | A1  | RX, RZ on every qubit                                   | 2n          | yes           |
//! | A3  | A1 + CRZ ladder (i, i+1)                                | 3n − 1      | yes           |
//! | A8  | A1 + CRX ladder (i, i+1)                                | 3n − 1      | yes           |
//! | A12 | RY, RZ on every qubit + fixed CNOT ring                 | 2n          | no            |
//! | A13 | RY, CRZ ring (i, i+1), RY, CRZ ring (i, i−1)            | 2n + 2·ring | yes           |
//! | A16 | A1 + CRZ on even pairs then odd pairs                   | 3n − 1      | yes           |
//! | A18 | A1 + CRX ring (i, i+1)                                  | 2n + ring   | yes           |
//!
//! `ring` is `n` for `n > 2`, 1 for `n = 2` and 0 for `n = 1`.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::simulator::{run_circuit, Angle, Gate, GateKind, Statevector};

/// Probe width above which identity checks fall back to a sampled basis.
const IDENTITY_PROBE_MAX_QUBITS: usize = 6;
const IDENTITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub gates: Vec<Gate>,
    pub identity_at_zero: bool,
}

impl Layer {
    pub fn new(gates: Vec<Gate>, identity_at_zero: bool) -> Self {
        Self {
            gates,
            identity_at_zero,
        }
    }

    fn slots(&self) -> impl Iterator<Item = usize> + '_ {
        self.gates.iter().filter_map(Gate::slot)
    }

    fn shifted(&self, delta: usize) -> Layer {
        Layer {
            gates: self.gates.iter().cloned().map(|g| g.with_slot_offset(delta)).collect(),
            identity_at_zero: self.identity_at_zero,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    layers: Vec<Layer>,
    param_count: usize,
}

impl Circuit {
    /// Validates qubit ranges and that the used slots are exactly
    /// `0..param_count`.
    pub fn new(n_qubits: usize, layers: Vec<Layer>) -> Result<Self> {
        let mut used: Vec<bool> = Vec::new();
        for layer in &layers {
            for g in &layer.gates {
                if let Some(&q) = g.qubits.iter().find(|&&q| q >= n_qubits) {
                    return Err(Error::QubitOutOfRange { qubit: q, n_qubits });
                }
                if let Some(s) = g.slot() {
                    if s >= used.len() {
                        used.resize(s + 1, false);
                    }
                    used[s] = true;
                }
            }
        }
        if let Some(s) = used.iter().position(|u| !u) {
            return Err(Error::InvalidArgument(format!("parameter slot {s} is never used")));
        }
        Ok(Self {
            n_qubits,
            param_count: used.len(),
            layers,
        })
    }

    pub fn empty(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            layers: Vec::new(),
            param_count: 0,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn param_count(&self) -> usize {
        self.param_count
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.layers.iter().flat_map(|l| l.gates.iter())
    }

    /// Concatenates `other` after `self`, renumbering its slots past ours.
    pub fn then(&self, other: &Circuit) -> Result<Circuit> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                got: other.n_qubits,
            });
        }
        let mut layers = self.layers.clone();
        layers.extend(other.layers.iter().map(|l| l.shifted(self.param_count)));
        Circuit::new(self.n_qubits, layers)
    }

    /// The first `k` layers. Slots must be numbered in layer order, which
    /// holds for every builder in this module except QAOA.
    pub fn prefix(&self, k: usize) -> Result<Circuit> {
        if k > self.layers.len() {
            return Err(Error::InvalidArgument(format!(
                "prefix of {k} layers from a {}-layer circuit",
                self.layers.len()
            )));
        }
        let c = Circuit::new(self.n_qubits, self.layers[..k].to_vec())?;
        let ranges = self.layer_slot_ranges()?;
        let expected = ranges[..k].last().map_or(0, |r| r.end);
        if c.param_count != expected {
            return Err(Error::InvalidArgument("slots are not numbered in layer order".into()));
        }
        Ok(c)
    }

    /// Contiguous slot range of each layer.
    pub fn layer_slot_ranges(&self) -> Result<Vec<Range<usize>>> {
        let mut out = Vec::with_capacity(self.layers.len());
        let mut next = 0;
        for (i, layer) in self.layers.iter().enumerate() {
            let mut slots: Vec<usize> = layer.slots().collect();
            slots.sort_unstable();
            let start = next;
            for s in slots {
                if s != next {
                    return Err(Error::InvalidArgument(format!(
                        "layer {i} slots are not contiguous from {start}"
                    )));
                }
                next += 1;
            }
            out.push(start..next);
        }
        Ok(out)
    }

    /// Number of gates reading each slot.
    pub fn slot_uses(&self) -> Vec<usize> {
        let mut uses = vec![0; self.param_count];
        for s in self.gates().filter_map(Gate::slot) {
            uses[s] += 1;
        }
        uses
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, layer) in self.layers.iter().enumerate() {
            writeln!(
                f,
                "# layer {i}{}",
                if layer.identity_at_zero { " (identity at zero)" } else { "" }
            )?;
            for g in &layer.gates {
                writeln!(f, "{g}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ArchitectureId {
    A1,
    A3,
    A8,
    A12,
    A13,
    A16,
    A18,
    #[serde(rename = "QAOA")]
    Qaoa,
}

impl ArchitectureId {
    pub const CATALOG: [ArchitectureId; 7] = [
        ArchitectureId::A1,
        ArchitectureId::A3,
        ArchitectureId::A8,
        ArchitectureId::A12,
        ArchitectureId::A13,
        ArchitectureId::A16,
        ArchitectureId::A18,
    ];

    pub fn identity_at_zero(self) -> bool {
        !matches!(self, ArchitectureId::A12)
    }

    /// Parameters per layer on `n` qubits.
    pub fn layer_params(self, n: usize) -> Option<usize> {
        let ring = ring_pairs(n).len();
        let ladder = n.saturating_sub(1);
        Some(match self {
            ArchitectureId::A1 | ArchitectureId::A12 => 2 * n,
            ArchitectureId::A3 | ArchitectureId::A8 | ArchitectureId::A16 => 2 * n + ladder,
            ArchitectureId::A13 => 2 * n + 2 * ring,
            ArchitectureId::A18 => 2 * n + ring,
            ArchitectureId::Qaoa => return None,
        })
    }
}

impl fmt::Display for ArchitectureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ArchitectureId::A1 => "A1",
            ArchitectureId::A3 => "A3",
            ArchitectureId::A8 => "A8",
            ArchitectureId::A12 => "A12",
            ArchitectureId::A13 => "A13",
            ArchitectureId::A16 => "A16",
            ArchitectureId::A18 => "A18",
            ArchitectureId::Qaoa => "QAOA",
        };
        f.write_str(s)
    }
}

impl FromStr for ArchitectureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "A1" | "1" => ArchitectureId::A1,
            "A3" | "3" => ArchitectureId::A3,
            "A8" | "8" => ArchitectureId::A8,
            "A12" | "12" => ArchitectureId::A12,
            "A13" | "13" => ArchitectureId::A13,
            "A16" | "16" => ArchitectureId::A16,
            "A18" | "18" => ArchitectureId::A18,
            "QAOA" => ArchitectureId::Qaoa,
            _ => return Err(Error::InvalidArgument(format!("unknown architecture {s:?}"))),
        })
    }
}

fn ladder_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect()
}

fn ring_pairs(n: usize) -> Vec<(usize, usize)> {
    match n {
        0 | 1 => Vec::new(),
        2 => vec![(0, 1)],
        _ => (0..n).map(|i| (i, (i + 1) % n)).collect(),
    }
}

/// Accumulates gates for one layer, handing out slots from 0.
struct LayerBuilder {
    gates: Vec<Gate>,
    next_slot: usize,
}

impl LayerBuilder {
    fn new() -> Self {
        Self {
            gates: Vec::new(),
            next_slot: 0,
        }
    }

    fn rot(&mut self, kind: GateKind, qubits: Vec<usize>) -> Result<()> {
        self.gates.push(Gate::slotted(kind, qubits, self.next_slot)?);
        self.next_slot += 1;
        Ok(())
    }

    fn rot_all(&mut self, kind: GateKind, n: usize) -> Result<()> {
        (0..n).try_for_each(|q| self.rot(kind, vec![q]))
    }

    fn entangle(&mut self, kind: GateKind, pairs: &[(usize, usize)]) -> Result<()> {
        pairs.iter().try_for_each(|&(c, t)| self.rot(kind, vec![c, t]))
    }

    fn fixed(&mut self, kind: GateKind, qubits: Vec<usize>) -> Result<()> {
        self.gates.push(Gate::fixed(kind, qubits)?);
        Ok(())
    }

    fn finish(self, identity_at_zero: bool) -> Layer {
        Layer::new(self.gates, identity_at_zero)
    }
}

fn catalog_layer(arch: ArchitectureId, n: usize) -> Result<Layer> {
    use GateKind::*;
    let mut b = LayerBuilder::new();
    match arch {
        ArchitectureId::A1 => {
            b.rot_all(Rx, n)?;
            b.rot_all(Rz, n)?;
        }
        ArchitectureId::A3 | ArchitectureId::A8 => {
            b.rot_all(Rx, n)?;
            b.rot_all(Rz, n)?;
            let kind = if arch == ArchitectureId::A3 { Crz } else { Crx };
            b.entangle(kind, &ladder_pairs(n))?;
        }
        ArchitectureId::A12 => {
            b.rot_all(Ry, n)?;
            b.rot_all(Rz, n)?;
            for (c, t) in ring_pairs(n) {
                b.fixed(Cnot, vec![c, t])?;
            }
        }
        ArchitectureId::A13 => {
            b.rot_all(Ry, n)?;
            b.entangle(Crz, &ring_pairs(n))?;
            b.rot_all(Ry, n)?;
            let reversed: Vec<_> = ring_pairs(n).into_iter().map(|(c, t)| (t, c)).collect();
            b.entangle(Crz, &reversed)?;
        }
        ArchitectureId::A16 => {
            b.rot_all(Rx, n)?;
            b.rot_all(Rz, n)?;
            let (even, odd): (Vec<_>, Vec<_>) = ladder_pairs(n).into_iter().partition(|(i, _)| i % 2 == 0);
            b.entangle(Crz, &even)?;
            b.entangle(Crz, &odd)?;
        }
        ArchitectureId::A18 => {
            b.rot_all(Rx, n)?;
            b.rot_all(Rz, n)?;
            b.entangle(Crx, &ring_pairs(n))?;
        }
        ArchitectureId::Qaoa => {
            return Err(Error::InvalidArgument("QAOA is built with build_qaoa".into()))
        }
    }
    // A single qubit has no ring, so A12 degenerates to pure rotations.
    let identity = arch.identity_at_zero() || ring_pairs(n).is_empty();
    Ok(b.finish(identity))
}

/// `n_layers` repetitions of the catalog layer for `arch`.
pub fn build_ansatz(arch: ArchitectureId, n_qubits: usize, n_layers: usize) -> Result<Circuit> {
    if n_layers == 0 {
        return Err(Error::InvalidArgument("need at least one layer".into()));
    }
    if n_qubits == 0 {
        return Err(Error::InvalidArgument("need at least one qubit".into()));
    }
    let layer = catalog_layer(arch, n_qubits)?;
    if n_qubits <= IDENTITY_PROBE_MAX_QUBITS {
        let single = Circuit::new(n_qubits, vec![layer.clone()])?;
        if verify_identity_at_zero(&single)? != layer.identity_at_zero {
            return Err(Error::InvalidArgument(format!(
                "{arch} layer identity-at-zero flag disagrees with simulation"
            )));
        }
    }
    let per = layer.slots().count();
    let layers = (0..n_layers).map(|i| layer.shifted(i * per)).collect();
    Circuit::new(n_qubits, layers)
}

/// RY on every qubit; prepended once by Layer-VQE.
pub fn ry_layer(n_qubits: usize) -> Result<Circuit> {
    let mut b = LayerBuilder::new();
    b.rot_all(GateKind::Ry, n_qubits)?;
    Circuit::new(n_qubits, vec![b.finish(true)])
}

/// QAOA for a diagonal cost Hamiltonian.
///
/// Layer 0 is the Hadamard wall. Round `i` (1-based) then applies
/// `exp(-iγ_i H_C)` as one MZ gate per non-identity term with angle
/// `2·c·γ_i`, followed by `exp(-iβ_i H_M)` with `H_M = −Σ X`, i.e. `RX(−2β_i)`
/// on every qubit. Slots: `β_i` is slot `i−1`, `γ_i` is slot `p+i−1`,
/// matching [`constant_speed_init`].
pub fn build_qaoa(h_cost: &PauliSum, p: usize) -> Result<Circuit> {
    if p == 0 {
        return Err(Error::InvalidArgument("QAOA depth must be >= 1".into()));
    }
    if !h_cost.is_diagonal() {
        return Err(Error::NonDiagonal);
    }
    let n = h_cost.n_qubits();
    let h_cost = h_cost.simplify();
    let mut layers = Vec::with_capacity(1 + 2 * p);
    let wall = (0..n)
        .map(|q| Gate::fixed(GateKind::H, vec![q]))
        .collect::<Result<Vec<_>>>()?;
    layers.push(Layer::new(wall, false));
    for i in 0..p {
        let beta = i;
        let gamma = p + i;
        let mut cost = Vec::new();
        for t in h_cost.terms() {
            if t.locality() == 0 {
                continue;
            }
            cost.push(Gate::new(
                GateKind::MultiZPhase,
                t.ops().keys().copied().collect(),
                Some(Angle::Slot {
                    slot: gamma,
                    scale: 2.0 * t.coefficient,
                }),
            )?);
        }
        // An all-identity cost still needs the slot to exist.
        if cost.is_empty() {
            cost.push(Gate::new(
                GateKind::MultiZPhase,
                vec![0],
                Some(Angle::Slot { slot: gamma, scale: 0.0 }),
            )?);
        }
        layers.push(Layer::new(cost, true));
        let mixer = (0..n)
            .map(|q| {
                Gate::new(
                    GateKind::Rx,
                    vec![q],
                    Some(Angle::Slot {
                        slot: beta,
                        scale: -2.0,
                    }),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        layers.push(Layer::new(mixer, true));
    }
    Circuit::new(n, layers)
}

/// `(β_1..β_p, γ_1..γ_p)` with `β_i = 1 − i/p`, `γ_i = i/p`.
pub fn constant_speed_init(p: usize) -> Vec<f64> {
    let pf = p as f64;
    let betas = (1..=p).map(|i| 1.0 - i as f64 / pf);
    let gammas = (1..=p).map(|i| i as f64 / pf);
    betas.chain(gammas).collect()
}

/// Runs the circuit at all-zero parameters and checks it acts as the exact
/// identity (phases included) on every basis state and on the uniform
/// superposition. Wider registers use 64 evenly spread basis states.
pub fn verify_identity_at_zero(circuit: &Circuit) -> Result<bool> {
    let n = circuit.n_qubits();
    let zeros = vec![0.0; circuit.param_count()];
    let dim = 1usize << n;
    let probes: Vec<usize> = if n <= IDENTITY_PROBE_MAX_QUBITS {
        (0..dim).collect()
    } else {
        let step = dim / 64;
        (0..64).map(|i| i * step + i % step.max(1)).collect()
    };
    let mut states: Vec<Statevector> = probes
        .into_iter()
        .map(|b| Statevector::basis(n, b))
        .collect::<Result<_>>()?;
    states.push(Statevector::uniform(n)?);
    for s in &states {
        let out = run_circuit(circuit, &zeros, s)?;
        let same = out
            .amplitudes()
            .iter()
            .zip(s.amplitudes())
            .all(|(a, b)| (a - b).norm() <= IDENTITY_TOL);
        if !same {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{expectation_exact, PauliTerm};
    use crate::problems::{coloring_hamiltonian, GraphInstance};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    #[test]
    fn catalog_param_counts() {
        assert_eq!(build_ansatz(ArchitectureId::A1, 4, 1).unwrap().param_count(), 8);
        assert_eq!(build_ansatz(ArchitectureId::A3, 4, 1).unwrap().param_count(), 11);
        for arch in ArchitectureId::CATALOG {
            for n in [2, 4, 8, 16] {
                for layers in 1..=3 {
                    let c = build_ansatz(arch, n, layers).unwrap();
                    assert_eq!(c.param_count(), layers * arch.layer_params(n).unwrap(), "{arch} n={n}");
                    assert!(c.slot_uses().iter().all(|&u| u == 1), "{arch}: slot bijection");
                    assert_eq!(c.layers().len(), layers);
                }
            }
        }
    }

    #[test]
    fn identity_flags() {
        for arch in ArchitectureId::CATALOG {
            let c = build_ansatz(arch, 4, 2).unwrap();
            assert_eq!(verify_identity_at_zero(&c).unwrap(), arch.identity_at_zero(), "{arch}");
            if arch.identity_at_zero() {
                let out = run_circuit(&c, &vec![0.0; c.param_count()], &Statevector::zero(4).unwrap()).unwrap();
                assert_eq!(out.probabilities()[0], 1.0);
            }
        }
        assert!(!verify_identity_at_zero(&build_ansatz(ArchitectureId::A12, 3, 1).unwrap()).unwrap());
        assert!(verify_identity_at_zero(&build_ansatz(ArchitectureId::A3, 8, 1).unwrap()).unwrap());
        let h = Circuit::new(2, vec![Layer::new(vec![Gate::fixed(GateKind::H, vec![0]).unwrap()], false)]).unwrap();
        assert!(!verify_identity_at_zero(&h).unwrap());
        assert!(verify_identity_at_zero(&ry_layer(3).unwrap()).unwrap());
    }

    #[test]
    fn build_errors() {
        assert!(build_ansatz(ArchitectureId::Qaoa, 4, 1).is_err());
        assert!(build_ansatz(ArchitectureId::A1, 4, 0).is_err());
        assert!("A99".parse::<ArchitectureId>().is_err());
        assert_eq!("a13".parse::<ArchitectureId>().unwrap(), ArchitectureId::A13);
    }

    #[test]
    fn prefix_and_concat() {
        let c = build_ansatz(ArchitectureId::A3, 4, 3).unwrap();
        let p = c.prefix(2).unwrap();
        assert_eq!(p.param_count(), 22);
        assert_eq!(c.layer_slot_ranges().unwrap(), vec![0..11, 11..22, 22..33]);
        let lvqe = ry_layer(4).unwrap().then(&c).unwrap();
        assert_eq!(lvqe.param_count(), 4 + 33);
        assert_eq!(lvqe.layer_slot_ranges().unwrap()[1], 4..15);
    }

    #[test]
    fn pretty_printer() {
        let c = build_ansatz(ArchitectureId::A3, 2, 1).unwrap();
        let text = c.to_string();
        assert!(text.contains("RX q0 slot0\n"));
        assert!(text.contains("CRZ q0 q1 slot4\n"));
    }

    #[test]
    fn constant_speed_schedule() {
        assert_eq!(constant_speed_init(1), vec![0.0, 1.0]);
        assert_eq!(constant_speed_init(2), vec![0.5, 0.0, 0.5, 1.0]);
        assert_eq!(constant_speed_init(3), vec![1.0 - 1.0 / 3.0, 1.0 - 2.0 / 3.0, 0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]);
    }

    #[test]
    fn qaoa_shape() {
        let g = GraphInstance::new(2, [(0, 1)], 4).unwrap();
        let h = coloring_hamiltonian(&g).unwrap().sum;
        let c = build_qaoa(&h, 3).unwrap();
        assert_eq!(c.param_count(), 6);
        let x = PauliSum::new(1, vec![PauliTerm::new(1.0, [(0, crate::pauli::Axis::X)]).unwrap()]).unwrap();
        assert!(matches!(build_qaoa(&x, 1), Err(Error::NonDiagonal)));
        assert!(build_qaoa(&h, 0).is_err());
    }

    #[test]
    fn qaoa_zero_angles_give_uniform_state() {
        let g = GraphInstance::new(4, [(0, 1), (1, 2), (2, 3), (0, 3)], 4).unwrap();
        let h = coloring_hamiltonian(&g).unwrap().sum;
        let c = build_qaoa(&h, 1).unwrap();
        let out = run_circuit(&c, &[0.0, 0.0], &Statevector::zero(8).unwrap()).unwrap();
        for p in out.probabilities() {
            assert_abs_diff_eq!(p, 1.0 / 256.0, epsilon = 1e-14);
        }
        let mean_diag = h.diagonal().unwrap().iter().sum::<f64>() / 256.0;
        assert_abs_diff_eq!(expectation_exact(&out, &h).unwrap(), mean_diag, epsilon = 1e-10);

        let two = build_qaoa(&PauliSum::new(2, vec![PauliTerm::z_string(1.0, [0, 1]).unwrap()]).unwrap(), 1).unwrap();
        let out = run_circuit(&two, &[0.0, 0.0], &Statevector::zero(2).unwrap()).unwrap();
        for a in out.amplitudes() {
            assert_abs_diff_eq!(a.re, 0.5, epsilon = 1e-15);
        }
    }

    /// Direct 2x2 product `e^{iβX} · e^{-iγZ} · H` applied to |0>.
    fn single_qubit_oracle(beta: f64, gamma: f64) -> [Complex64; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let after_h = [Complex64::new(h, 0.0), Complex64::new(h, 0.0)];
        let uc = [Complex64::from_polar(1.0, -gamma), Complex64::from_polar(1.0, gamma)];
        let after_c = [after_h[0] * uc[0], after_h[1] * uc[1]];
        let (c, s) = (beta.cos(), beta.sin());
        let i_s = Complex64::new(0.0, s);
        [c * after_c[0] + i_s * after_c[1], i_s * after_c[0] + c * after_c[1]]
    }

    #[test]
    fn qaoa_single_qubit_matches_matrix_product() {
        let h = PauliSum::new(1, vec![PauliTerm::z_string(1.0, [0]).unwrap()]).unwrap();
        let c = build_qaoa(&h, 1).unwrap();
        for (beta, gamma) in [(0.3, 0.7), (1.1, -0.4), (0.0, 2.0), (-0.9, 0.25)] {
            let out = run_circuit(&c, &[beta, gamma], &Statevector::zero(1).unwrap()).unwrap();
            let oracle = single_qubit_oracle(beta, gamma);
            for (a, b) in out.amplitudes().iter().zip(oracle) {
                assert!((a - b).norm() < 1e-10);
            }
            let z = expectation_exact(&out, &h).unwrap();
            assert_abs_diff_eq!(z, -(2.0 * beta).sin() * (2.0 * gamma).sin(), epsilon = 1e-10);
        }
    }
}
