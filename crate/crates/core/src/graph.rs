//! Directed weighted topology construction, generators, and structural
//! queries. Node indices are 0-based here; the file format and reports use
//! 1-based labels.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// A simple directed weighted graph: no self-loops, no duplicate edges,
/// nonzero weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub node_count: usize,
    pub edges: Vec<Edge>,
}

/// Edge `from -> to` with a nonzero weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TopologyError {
    #[error("node count must be at least 1")]
    Empty,
    #[error("edge ({from}, {to}): self-loop")]
    SelfLoop { from: usize, to: usize },
    #[error("edge ({from}, {to}): node index out of range for {node_count} nodes")]
    IndexOutOfRange { from: usize, to: usize, node_count: usize },
    #[error("edge ({from}, {to}): duplicate")]
    Duplicate { from: usize, to: usize },
    #[error("edge ({from}, {to}): weight must be nonzero")]
    ZeroWeight { from: usize, to: usize },
    #[error("edge probability {p} outside [0, 1]")]
    BadProbability { p: f64 },
}

/// Weight distribution for random generators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightDist {
    /// All weights 1.
    Unit,
    /// Uniform on `[-hi, -lo] U [lo, hi]`, keeping weights away from zero.
    SymmetricUniform { lo: f64, hi: f64 },
}

impl Default for WeightDist {
    fn default() -> Self {
        WeightDist::SymmetricUniform { lo: 0.5, hi: 1.5 }
    }
}

impl WeightDist {
    fn sample(&self, rng: &mut impl Rng) -> f64 {
        match *self {
            WeightDist::Unit => 1.0,
            WeightDist::SymmetricUniform { lo, hi } => {
                let magnitude = rng.gen_range(lo..hi);
                if rng.gen_bool(0.5) {
                    magnitude
                } else {
                    -magnitude
                }
            }
        }
    }
}

/// Topology family to generate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TopologyKind {
    /// Directed path `1 -> 2 -> ... -> N`.
    Chain,
    /// Hub node 1 with edges `1 -> k` for all other `k`.
    Star,
    /// Directed cycle `1 -> 2 -> ... -> N -> 1`.
    Ring,
    /// Independent edge inclusion with probability `p`.
    RandomDirected { p: f64, weights: WeightDist },
}

impl Topology {
    pub fn new(node_count: usize, edges: Vec<Edge>) -> Result<Self, TopologyError> {
        let t = Self { node_count, edges };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), TopologyError> {
        if self.node_count == 0 {
            return Err(TopologyError::Empty);
        }
        let mut seen = std::collections::HashSet::new();
        for e in &self.edges {
            if e.from >= self.node_count || e.to >= self.node_count {
                return Err(TopologyError::IndexOutOfRange {
                    from: e.from,
                    to: e.to,
                    node_count: self.node_count,
                });
            }
            if e.from == e.to {
                return Err(TopologyError::SelfLoop { from: e.from, to: e.to });
            }
            if e.weight == 0.0 {
                return Err(TopologyError::ZeroWeight { from: e.from, to: e.to });
            }
            if !seen.insert((e.from, e.to)) {
                return Err(TopologyError::Duplicate { from: e.from, to: e.to });
            }
        }
        Ok(())
    }

    /// Weighted adjacency: `W[(i, j)]` is the weight of edge `j -> i`.
    pub fn to_adjacency(&self) -> Array2<f64> {
        let mut w = Array2::zeros((self.node_count, self.node_count));
        for e in &self.edges {
            w[(e.to, e.from)] = e.weight;
        }
        w
    }

    /// Nodes with no incoming edges (all-zero adjacency row).
    pub fn sources(&self) -> Vec<usize> {
        let mut has_incoming = vec![false; self.node_count];
        for e in &self.edges {
            has_incoming[e.to] = true;
        }
        (0..self.node_count).filter(|&i| !has_incoming[i]).collect()
    }

    /// Forward reachability along edge direction from the driver set,
    /// including the drivers themselves.
    pub fn reachable_from(&self, drivers: &[usize]) -> std::collections::BTreeSet<usize> {
        let mut adj = vec![Vec::new(); self.node_count];
        for e in &self.edges {
            adj[e.from].push(e.to);
        }
        let mut reached: std::collections::BTreeSet<usize> =
            drivers.iter().copied().filter(|&d| d < self.node_count).collect();
        let mut frontier: Vec<usize> = reached.iter().copied().collect();
        while let Some(u) = frontier.pop() {
            for &v in &adj[u] {
                if reached.insert(v) {
                    frontier.push(v);
                }
            }
        }
        reached
    }
}

/// Generate a topology; deterministic for a fixed seed.
pub fn generate(kind: TopologyKind, node_count: usize, seed: u64) -> Result<Topology, TopologyError> {
    if node_count == 0 {
        return Err(TopologyError::Empty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = match kind {
        TopologyKind::Chain => (0..node_count.saturating_sub(1))
            .map(|k| Edge { from: k, to: k + 1, weight: 1.0 })
            .collect(),
        TopologyKind::Star => (1..node_count)
            .map(|k| Edge { from: 0, to: k, weight: 1.0 })
            .collect(),
        TopologyKind::Ring => {
            if node_count == 1 {
                Vec::new()
            } else {
                (0..node_count)
                    .map(|k| Edge { from: k, to: (k + 1) % node_count, weight: 1.0 })
                    .collect()
            }
        }
        TopologyKind::RandomDirected { p, weights } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(TopologyError::BadProbability { p });
            }
            let mut edges = Vec::new();
            for from in 0..node_count {
                for to in 0..node_count {
                    if from != to && rng.gen_bool(p) {
                        edges.push(Edge { from, to, weight: weights.sample(&mut rng) });
                    }
                }
            }
            edges
        }
    };
    Topology::new(node_count, edges)
}
