//! Graph-coloring instances, their Hamiltonian encoding and brute-force
//! ground-truth oracles.
//!
//! Bit packing is node-major: bit `l` of node `v`'s color sits on qubit
//! `v·m + l`, so node `v` owns qubits `v·m .. v·m+m`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};
use crate::pauli::{PauliSum, PauliTerm};
use crate::rng::rng_from_seed;
use crate::simulator::MAX_QUBITS;

/// Largest search space `count_proper_colorings` will enumerate.
pub const ENUMERATION_CAP: u128 = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hardness {
    pub solution_count: u64,
    pub solution_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphInstance {
    n_nodes: usize,
    edges: Vec<(usize, usize)>,
    k_colors: usize,
    m_bits: usize,
    pub seed: u64,
    pub p_edge: f64,
    hardness: Option<Hardness>,
}

impl GraphInstance {
    /// Edges are normalised to `(min, max)`, deduplicated and sorted.
    pub fn new(n_nodes: usize, edges: impl IntoIterator<Item = (usize, usize)>, k_colors: usize) -> Result<Self> {
        if n_nodes == 0 {
            return Err(Error::InvalidArgument("graph needs at least one node".into()));
        }
        if k_colors < 2 || !k_colors.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(k_colors));
        }
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidArgument(format!("self-loop on node {u}")));
            }
            if u.max(v) >= n_nodes {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u}, {v}) outside {n_nodes} nodes"
                )));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Self {
            n_nodes,
            edges: set.into_iter().collect(),
            k_colors,
            m_bits: k_colors.trailing_zeros() as usize,
            seed: 0,
            p_edge: 0.0,
            hardness: None,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn k_colors(&self) -> usize {
        self.k_colors
    }

    pub fn m_bits(&self) -> usize {
        self.m_bits
    }

    pub fn n_qubits(&self) -> usize {
        self.n_nodes * self.m_bits
    }

    pub fn search_space(&self) -> u128 {
        (self.k_colors as u128).pow(self.n_nodes as u32)
    }

    pub fn hardness(&self) -> Option<Hardness> {
        self.hardness
    }

    /// Fills in the brute-forced solution count and ratio.
    pub fn with_hardness(mut self) -> Result<Self> {
        let count = count_proper_colorings(&self)?;
        self.hardness = Some(Hardness {
            solution_count: count,
            solution_ratio: count as f64 / self.search_space() as f64,
        });
        Ok(self)
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter_map(move |&(a, b)| {
            if a == v {
                Some(b)
            } else if b == v {
                Some(a)
            } else {
                None
            }
        })
    }

    /// Color of node `v` in basis state `index`.
    pub fn color_of(&self, index: usize, v: usize) -> usize {
        (index >> (v * self.m_bits)) & (self.k_colors - 1)
    }

    pub fn decode(&self, index: usize) -> ColorAssignment {
        ColorAssignment {
            colors: (0..self.n_nodes).map(|v| self.color_of(index, v)).collect(),
        }
    }

    pub fn encode(&self, assignment: &ColorAssignment) -> Result<usize> {
        if assignment.colors.len() != self.n_nodes {
            return Err(Error::DimensionMismatch {
                expected: self.n_nodes,
                got: assignment.colors.len(),
            });
        }
        let mut index = 0;
        for (v, &c) in assignment.colors.iter().enumerate() {
            if c >= self.k_colors {
                return Err(Error::InvalidArgument(format!("color {c} >= {}", self.k_colors)));
            }
            index |= c << (v * self.m_bits);
        }
        Ok(index)
    }

    /// Number of monochromatic edges in basis state `index`.
    pub fn conflicts(&self, index: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(u, v)| self.color_of(index, u) == self.color_of(index, v))
            .count()
    }

    pub fn is_proper_index(&self, index: usize) -> bool {
        self.edges
            .iter()
            .all(|&(u, v)| self.color_of(index, u) != self.color_of(index, v))
    }

    /// `mask[b]` is true iff basis state `b` encodes a proper coloring.
    pub fn proper_mask(&self) -> Result<Vec<bool>> {
        let n = self.n_qubits();
        if n > MAX_QUBITS {
            return Err(Error::ResourceLimit {
                what: "proper-coloring mask",
                requested: n,
                cap: MAX_QUBITS,
            });
        }
        Ok((0..1usize << n).map(|b| self.is_proper_index(b)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorAssignment {
    pub colors: Vec<usize>,
}

/// Erdős–Rényi–Gilbert sample: each pair `(u, v)`, `u < v`, visited in
/// lexicographic order, is kept when the next ChaCha8 uniform draw is `< p`.
/// Connectivity is not guaranteed.
pub fn generate_graph(n: usize, p: f64, seed: u64, k_colors: usize) -> Result<GraphInstance> {
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two nodes".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = rng_from_seed(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    let mut g = GraphInstance::new(n, edges, k_colors)?;
    g.seed = seed;
    g.p_edge = p;
    Ok(g)
}

/// Breadth-first visit order from node 0 with ascending neighbor order;
/// unreachable nodes are appended in index order.
pub fn bfs_order(graph: &GraphInstance) -> Vec<usize> {
    let n = graph.n_nodes();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nb: Vec<usize> = graph.neighbors(v).collect();
            nb.sort_unstable();
            for w in nb {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    order
}

pub fn is_connected(graph: &GraphInstance) -> bool {
    let n = graph.n_nodes();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut reached = 1;
    while let Some(v) = stack.pop() {
        for w in graph.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                reached += 1;
                stack.push(w);
            }
        }
    }
    reached == n
}

/// The coloring Hamiltonian together with the edge each term came from.
#[derive(Debug, Clone, PartialEq)]
pub struct ColoringHamiltonian {
    /// Terms in input order: edges sorted, each edge's expansion in
    /// canonical monomial order. Not simplified across edges.
    pub sum: PauliSum,
    /// `term_edge[i]` indexes into `graph.edges()`.
    pub term_edge: Vec<usize>,
}

impl ColoringHamiltonian {
    pub fn simplified(&self) -> PauliSum {
        self.sum.simplify()
    }
}

/// Literal expansion of one edge's penalty
/// `Σ_{a∈B^m} Π_l (1 + (−1)^{a_l} Z_{v,l})(1 + (−1)^{a_l} Z_{w,l})`
/// into signed Z-monomials (qubit bitmask, coefficient), before any merging.
pub fn expand_edge_raw(v: usize, w: usize, m_bits: usize) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    for a in 0..1usize << m_bits {
        // Each factor l contributes one of 1, sZ_v, sZ_w, Z_vZ_w.
        let mut partial: Vec<(usize, f64)> = vec![(0, 1.0)];
        for l in 0..m_bits {
            let s = if a >> l & 1 == 1 { -1.0 } else { 1.0 };
            let qv = 1usize << (v * m_bits + l);
            let qw = 1usize << (w * m_bits + l);
            let factor = [(0, 1.0), (qv, s), (qw, s), (qv | qw, 1.0)];
            partial = partial
                .iter()
                .flat_map(|&(mask, c)| factor.iter().map(move |&(fm, fc)| (mask ^ fm, c * fc)))
                .collect();
        }
        out.extend(partial);
    }
    out
}

/// Encodes the satisfiability version of k-coloring. Each edge expands to
/// `2^m · Π_l (1 + Z_{v,l} Z_{w,l})`, so the diagonal equals
/// `4^m × (monochromatic edges)` and proper colorings sit at energy 0.
pub fn coloring_hamiltonian(graph: &GraphInstance) -> Result<ColoringHamiltonian> {
    let n_qubits = graph.n_qubits();
    if n_qubits > 64 {
        return Err(Error::ResourceLimit {
            what: "coloring encoding",
            requested: n_qubits,
            cap: 64,
        });
    }
    let mut terms = Vec::new();
    let mut term_edge = Vec::new();
    for (e, &(v, w)) in graph.edges().iter().enumerate() {
        let raw = expand_edge_raw(v, w, graph.m_bits());
        let edge_terms = raw
            .into_iter()
            .map(|(mask, c)| PauliTerm::z_string(c, (0..n_qubits).filter(|q| mask >> q & 1 == 1)))
            .collect::<Result<Vec<_>>>()?;
        let merged = PauliSum::new(n_qubits, edge_terms)?.simplify();
        term_edge.extend(std::iter::repeat(e).take(merged.len()));
        terms.extend(merged.terms().iter().cloned());
    }
    Ok(ColoringHamiltonian {
        sum: PauliSum::new(n_qubits, terms)?,
        term_edge,
    })
}

/// Exhaustive count of assignments without a monochromatic edge.
pub fn count_proper_colorings(graph: &GraphInstance) -> Result<u64> {
    let size = graph.search_space();
    if size > ENUMERATION_CAP {
        return Err(Error::EnumerationCap {
            size,
            cap: ENUMERATION_CAP,
        });
    }
    let n = graph.n_nodes();
    let k = graph.k_colors();
    let mut colors = vec![0usize; n];
    let mut count = 0u64;
    loop {
        if graph.edges().iter().all(|&(u, v)| colors[u] != colors[v]) {
            count += 1;
        }
        // odometer increment
        let mut i = 0;
        loop {
            if i == n {
                return Ok(count);
            }
            colors[i] += 1;
            if colors[i] < k {
                break;
            }
            colors[i] = 0;
            i += 1;
        }
    }
}

/// Checks a bitstring given qubit-0-first, `n_nodes·m_bits` long.
pub fn is_proper(graph: &GraphInstance, bits: &[bool]) -> Result<bool> {
    if bits.len() != graph.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: graph.n_qubits(),
            got: bits.len(),
        });
    }
    let index = bits
        .iter()
        .enumerate()
        .fold(0usize, |acc, (q, &b)| acc | (usize::from(b) << q));
    Ok(graph.is_proper_index(index))
}

/// Writes the plain-text fixture format:
///
/// ```text
/// nodes=<n> colors=<k> p=<p> seed=<s>
/// edge <u> <v>
/// solutions=<s> ratio=<r>
/// ```
pub fn write_fixture(graph: &GraphInstance) -> Result<String> {
    let hardness = match graph.hardness() {
        Some(h) => h,
        None => graph.clone().with_hardness()?.hardness().unwrap(),
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        "nodes={} colors={} p={:?} seed={}",
        graph.n_nodes(),
        graph.k_colors(),
        graph.p_edge,
        graph.seed
    );
    for (u, v) in graph.edges() {
        let _ = writeln!(s, "edge {u} {v}");
    }
    let _ = writeln!(
        s,
        "solutions={} ratio={:?}",
        hardness.solution_count, hardness.solution_ratio
    );
    Ok(s)
}

pub fn parse_fixture(text: &str) -> Result<GraphInstance> {
    let mut header: Option<(usize, usize, f64, u64)> = None;
    let mut edges = Vec::new();
    let mut stored: Option<(u64, f64, usize)> = None;
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        last_line = lineno;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("edge ") {
            let mut it = rest.split_whitespace().map(str::parse::<usize>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(u)), Some(Ok(v)), None) => edges.push((u, v)),
                _ => return Err(Error::parse(lineno, "expected `edge <u> <v>`")),
            }
            continue;
        }
        let kv = parse_kv(line, lineno)?;
        let get = |k: &str| {
            kv.iter()
                .find(|(key, _)| key == k)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| Error::parse(lineno, format!("missing `{k}=`")))
        };
        let num = |k: &str| -> Result<f64> {
            get(k)?.parse().map_err(|_| Error::parse(lineno, format!("bad `{k}`")))
        };
        let int = |k: &str| -> Result<u64> {
            get(k)?.parse().map_err(|_| Error::parse(lineno, format!("bad `{k}`")))
        };
        if kv.iter().any(|(k, _)| k == "nodes") {
            header = Some((int("nodes")? as usize, int("colors")? as usize, num("p")?, int("seed")?));
        } else if kv.iter().any(|(k, _)| k == "solutions") {
            stored = Some((int("solutions")?, num("ratio")?, lineno));
        } else {
            return Err(Error::parse(lineno, "unrecognised line"));
        }
    }
    let (n, k, p, seed) = header.ok_or_else(|| Error::parse(1, "missing header line"))?;
    let mut g = GraphInstance::new(n, edges, k).map_err(|e| Error::parse(last_line, e.to_string()))?;
    g.p_edge = p;
    g.seed = seed;
    if let Some((s, r, lineno)) = stored {
        let expected_ratio = s as f64 / g.search_space() as f64;
        if r != expected_ratio {
            return Err(Error::parse(
                lineno,
                format!("ratio {r} inconsistent with {s} solutions"),
            ));
        }
        g.hardness = Some(Hardness {
            solution_count: s,
            solution_ratio: r,
        });
    }
    Ok(g)
}

fn parse_kv(line: &str, lineno: usize) -> Result<Vec<(String, String)>> {
    line.split_whitespace()
        .map(|tok| {
            tok.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| Error::parse(lineno, format!("expected key=value, got {tok:?}")))
        })
        .collect()
}

/// Edge probabilities and starting seeds of the ten 8-node, 4-color
/// reference instances; see [`reference_instance`].
pub const REFERENCE_SUITE: [(f64, u64); 10] = [
    (0.30, 7000),
    (0.55, 8000),
    (0.40, 9000),
    (0.40, 10000),
    (0.35, 11000),
    (0.30, 12000),
    (0.35, 13000),
    (0.50, 14000),
    (0.90, 15000),
    (0.40, 16000),
];

/// Reference instance `i` (0-based) of [`REFERENCE_SUITE`]: the first sample
/// at or after its seed (offset by `seed_offset`) that is connected and has at
/// least one proper 4-coloring.
pub fn reference_instance(i: usize, seed_offset: u64) -> Result<GraphInstance> {
    let &(p, base) = REFERENCE_SUITE
        .get(i)
        .ok_or_else(|| Error::InvalidArgument(format!("reference instance {i} out of range")))?;
    let mut seed = base.wrapping_add(seed_offset);
    for _ in 0..100_000 {
        let g = generate_connected(8, p, seed, 4, 1, 10_000)?;
        if g.hardness().is_some_and(|h| h.solution_count > 0) {
            return Ok(g);
        }
        seed = g.seed + 1;
    }
    Err(Error::InvalidArgument(format!("no colorable reference graph for p={p}")))
}

/// Connected sample for `(n, p)`: tries `seed`, `seed + stride`, … until the
/// graph is connected, up to `max_tries` candidates.
pub fn generate_connected(
    n: usize,
    p: f64,
    seed: u64,
    k_colors: usize,
    stride: u64,
    max_tries: usize,
) -> Result<GraphInstance> {
    for t in 0..max_tries as u64 {
        let g = generate_graph(n, p, seed.wrapping_add(t * stride), k_colors)?;
        if is_connected(&g) {
            return g.with_hardness();
        }
    }
    Err(Error::InvalidArgument(format!(
        "no connected graph for n={n} p={p} within {max_tries} seeds"
    )))
}
