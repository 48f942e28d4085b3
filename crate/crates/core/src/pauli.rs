//! Pauli strings, Hamiltonian sums and their expectation values.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_PI_2;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed};
use crate::simulator::{sample_indices, Angle, Gate, GateKind, Statevector};

/// Coefficients below this magnitude are dropped by [`PauliSum::simplify`].
pub const ZERO_COEFF_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    fn letter(self) -> char {
        match self {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    ops: BTreeMap<usize, Axis>,
}

impl PauliTerm {
    pub fn identity(coefficient: f64) -> Self {
        Self {
            coefficient,
            ops: BTreeMap::new(),
        }
    }

    pub fn new(coefficient: f64, ops: impl IntoIterator<Item = (usize, Axis)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (q, a) in ops {
            if map.insert(q, a).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "qubit {q} appears twice in a Pauli term"
                )));
            }
        }
        Ok(Self {
            coefficient,
            ops: map,
        })
    }

    /// Product of `Z` on each listed qubit.
    pub fn z_string(coefficient: f64, qubits: impl IntoIterator<Item = usize>) -> Result<Self> {
        Self::new(coefficient, qubits.into_iter().map(|q| (q, Axis::Z)))
    }

    pub fn ops(&self) -> &BTreeMap<usize, Axis> {
        &self.ops
    }

    pub fn locality(&self) -> usize {
        self.ops.len()
    }

    pub fn is_diagonal(&self) -> bool {
        self.ops.values().all(|&a| a == Axis::Z)
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.ops.keys().next_back().copied()
    }

    fn key(&self) -> Vec<(usize, Axis)> {
        self.ops.iter().map(|(&q, &a)| (q, a)).collect()
    }

    fn mask_of(&self, pred: impl Fn(Axis) -> bool) -> usize {
        self.ops
            .iter()
            .filter(|(_, &a)| pred(a))
            .fold(0, |m, (&q, _)| m | (1 << q))
    }

    /// Bitmask of all non-identity qubits.
    pub fn support_mask(&self) -> usize {
        self.mask_of(|_| true)
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coefficient)?;
        if self.ops.is_empty() {
            return write!(f, " I");
        }
        for (q, a) in &self.ops {
            write!(f, " {}{}", a.letter(), q)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn new(n_qubits: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        for t in &terms {
            if let Some(q) = t.max_qubit() {
                if q >= n_qubits {
                    return Err(Error::QubitOutOfRange { qubit: q, n_qubits });
                }
            }
        }
        Ok(Self { n_qubits, terms })
    }

    pub fn empty(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.iter().all(PauliTerm::is_diagonal)
    }

    /// Merges like terms, drops `|c| < 1e-12` and sorts terms by their
    /// `(qubit, axis)` sequence (identity first).
    pub fn simplify(&self) -> PauliSum {
        let mut merged: BTreeMap<Vec<(usize, Axis)>, f64> = BTreeMap::new();
        for t in &self.terms {
            *merged.entry(t.key()).or_insert(0.0) += t.coefficient;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| c.abs() >= ZERO_COEFF_EPS)
            .map(|(k, c)| PauliTerm {
                coefficient: c,
                ops: k.into_iter().collect(),
            })
            .collect();
        PauliSum {
            n_qubits: self.n_qubits,
            terms,
        }
    }

    /// Sub-sum made of the listed term indices, in ascending index order.
    pub fn select(&self, indices: &BTreeSet<usize>) -> Result<PauliSum> {
        let mut terms = Vec::with_capacity(indices.len());
        for &i in indices {
            let t = self.terms.get(i).ok_or_else(|| {
                Error::InvalidArgument(format!("term index {i} out of range ({})", self.len()))
            })?;
            terms.push(t.clone());
        }
        Ok(PauliSum {
            n_qubits: self.n_qubits,
            terms,
        })
    }

    /// Diagonal of an all-Z sum over the computational basis.
    pub fn diagonal(&self) -> Result<Vec<f64>> {
        if !self.is_diagonal() {
            return Err(Error::NonDiagonal);
        }
        let dim = 1usize << self.n_qubits;
        let mut diag = vec![0.0; dim];
        for t in &self.terms {
            let mask = t.support_mask();
            let c = t.coefficient;
            for (b, d) in diag.iter_mut().enumerate() {
                if (b & mask).count_ones() % 2 == 0 {
                    *d += c;
                } else {
                    *d -= c;
                }
            }
        }
        Ok(diag)
    }

    /// Counts simplified terms by locality; identity terms land at 0.
    pub fn locality_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for t in self.simplify().terms {
            *h.entry(t.locality()).or_insert(0) += 1;
        }
        h
    }

    /// One term per line, `<coeff> <axis><qubit> ...`, identity as `<coeff> I`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for t in &self.terms {
            s.push_str(&t.to_string());
            s.push('\n');
        }
        s
    }

    /// Parses [`PauliSum::to_text`] output. Without an explicit width the
    /// register is sized to the largest qubit index seen.
    pub fn parse(text: &str, n_qubits: Option<usize>) -> Result<PauliSum> {
        let mut terms = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let coeff: f64 = parts
                .next()
                .unwrap()
                .parse()
                .map_err(|_| Error::parse(lineno + 1, "bad coefficient"))?;
            let mut ops = Vec::new();
            let mut saw_identity = false;
            for tok in parts {
                if tok == "I" {
                    saw_identity = true;
                    continue;
                }
                let mut chars = tok.chars();
                let axis = match chars.next() {
                    Some('X') => Axis::X,
                    Some('Y') => Axis::Y,
                    Some('Z') => Axis::Z,
                    _ => return Err(Error::parse(lineno + 1, format!("bad operator {tok:?}"))),
                };
                let q: usize = chars
                    .as_str()
                    .parse()
                    .map_err(|_| Error::parse(lineno + 1, format!("bad qubit in {tok:?}")))?;
                ops.push((q, axis));
            }
            if saw_identity && !ops.is_empty() {
                return Err(Error::parse(lineno + 1, "I mixed with other operators"));
            }
            terms.push(
                PauliTerm::new(coeff, ops).map_err(|e| Error::parse(lineno + 1, e.to_string()))?,
            );
        }
        let width = n_qubits.unwrap_or_else(|| {
            terms
                .iter()
                .filter_map(PauliTerm::max_qubit)
                .max()
                .map_or(1, |q| q + 1)
        });
        PauliSum::new(width, terms)
    }
}

/// Expectation value `⟨ψ|H|ψ⟩`. All-Z sums take the diagonal path
/// `Σ_b p(b)·diag(b)`.
pub fn expectation_exact(state: &Statevector, sum: &PauliSum) -> Result<f64> {
    state.check_dim(sum.n_qubits)?;
    if sum.is_diagonal() {
        let probs = state.probabilities();
        return Ok(sum
            .terms
            .iter()
            .map(|t| {
                let mask = t.support_mask();
                let parity: f64 = probs
                    .iter()
                    .enumerate()
                    .map(|(b, p)| if (b & mask).count_ones() % 2 == 0 { *p } else { -*p })
                    .sum();
                t.coefficient * parity
            })
            .sum());
    }
    Ok(sum
        .terms
        .iter()
        .map(|t| t.coefficient * pauli_expectation(state, t))
        .sum())
}

/// `⟨ψ|P|ψ⟩` for one Pauli string, by direct action on the amplitudes.
fn pauli_expectation(state: &Statevector, term: &PauliTerm) -> f64 {
    let flip = term.mask_of(|a| a != Axis::Z);
    let sign_mask = term.mask_of(|a| a != Axis::X);
    let n_y = term.ops.values().filter(|&&a| a == Axis::Y).count();
    let i_pow = match n_y % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    let amps = state.amplitudes();
    let mut acc = Complex64::new(0.0, 0.0);
    for (b, a) in amps.iter().enumerate() {
        // P|b> = i^{n_y} (-1)^{|b & (Y|Z)|} |b ^ (X|Y)>
        let sign = if (b & sign_mask).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        acc += amps[b ^ flip].conj() * a * sign;
    }
    (acc * i_pow).re
}

/// Shot-based estimate of `⟨ψ|H|ψ⟩`.
///
/// Terms are greedily grouped so that each group shares one measurement basis
/// per qubit. Each group is measured with `shots` samples after rotating X
/// qubits with H and Y qubits with RZ(-π/2)·H; the sampling seed of group `g`
/// is `derive_seed(seed, [g])`. An all-Z sum is a single group, so one
/// histogram scores every term. Identity terms contribute their coefficient.
pub fn expectation_shots(state: &Statevector, sum: &PauliSum, shots: usize, seed: u64) -> Result<f64> {
    state.check_dim(sum.n_qubits)?;
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be >= 1".into()));
    }
    let mut total = 0.0;
    let mut groups: Vec<(BTreeMap<usize, Axis>, Vec<&PauliTerm>)> = Vec::new();
    for t in &sum.terms {
        if t.ops.is_empty() {
            total += t.coefficient;
            continue;
        }
        let slot = groups.iter_mut().find(|(basis, _)| {
            t.ops
                .iter()
                .all(|(q, a)| basis.get(q).map_or(true, |b| b == a))
        });
        match slot {
            Some((basis, members)) => {
                basis.extend(t.ops.iter().map(|(&q, &a)| (q, a)));
                members.push(t);
            }
            None => groups.push((t.ops.clone(), vec![t])),
        }
    }
    for (g, (basis, members)) in groups.iter().enumerate() {
        let mut rotated = state.clone();
        for (&q, &a) in basis {
            if a == Axis::Y {
                let sdg = Gate::new(GateKind::Rz, vec![q], Some(Angle::Fixed(-FRAC_PI_2)))?;
                rotated.apply_gate(&sdg, None)?;
            }
            if a != Axis::Z {
                rotated.apply_gate(&Gate::fixed(GateKind::H, vec![q])?, None)?;
            }
        }
        let mut rng = rng_from_seed(derive_seed(seed, &[g as u64]));
        let samples = sample_indices(&rotated.probabilities(), shots, &mut rng);
        for t in members {
            let mask = t.support_mask();
            let plus = samples
                .iter()
                .filter(|&&b| (b & mask).count_ones() % 2 == 0)
                .count() as f64;
            total += t.coefficient * (2.0 * plus - shots as f64) / shots as f64;
        }
    }
    Ok(total)
}

/// Ordered blocks of term indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    labels: Option<Vec<String>>,
}

impl Partition {
    /// Builds a partition over `n_terms` term indices. Blocks must be
    /// non-empty and cover every index; `allow_overlap` permits an index to
    /// sit in several blocks.
    pub fn new(blocks: Vec<Vec<usize>>, n_terms: usize, allow_overlap: bool) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidArgument("partition has no blocks".into()));
        }
        let mut seen = vec![false; n_terms];
        for (j, b) in blocks.iter().enumerate() {
            if b.is_empty() {
                return Err(Error::InvalidArgument(format!("block {j} is empty")));
            }
            for &i in b {
                if i >= n_terms {
                    return Err(Error::InvalidArgument(format!(
                        "block {j} references term {i} of {n_terms}"
                    )));
                }
                if seen[i] && !allow_overlap {
                    return Err(Error::InvalidArgument(format!(
                        "term {i} appears in more than one block"
                    )));
                }
                seen[i] = true;
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidArgument(format!("term {i} is in no block")));
        }
        Ok(Self {
            blocks,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.blocks.len() {
            return Err(Error::InvalidArgument("label count differs from block count".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Term indices in the union of the first `k` blocks.
    pub fn prefix_indices(&self, k: usize) -> Result<BTreeSet<usize>> {
        if k == 0 || k > self.blocks.len() {
            return Err(Error::InvalidArgument(format!(
                "prefix {k} out of range 1..={}",
                self.blocks.len()
            )));
        }
        Ok(self.blocks[..k].iter().flatten().copied().collect())
    }
}

/// Simplified sum of all terms in the first `k` blocks; indices shared by
/// overlapping blocks count once.
pub fn assemble_prefix(sum: &PauliSum, partition: &Partition, k: usize) -> Result<PauliSum> {
    let idx = partition.prefix_indices(k)?;
    Ok(sum.select(&idx)?.simplify())
}
