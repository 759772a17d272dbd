//! Domain types for heterogeneous networks and assembly of the lifted system.
//!
//! A network couples `N` node systems `(A_i, B_i, C_i)` through a weighted
//! adjacency matrix `W` (entry `w[i][j]` is the weight of edge `j -> i`) and
//! an inner coupling matrix `H`. The lifted pair is
//! `Phi = blockdiag(A_i) + [w_ij H C_j]` and `Psi = blockdiag(delta_i B_i)`.

use ndarray::{Array2, ArrayView2};
use thiserror::Error;

/// Tolerances threaded through every numerical decision.
#[derive(Debug, Clone)]
pub struct ToleranceConfig {
    /// Multiplier on the standard rank cutoff
    /// `max_dim * sigma_max * machine_eps`.
    pub rank_factor: f64,
    /// Radius for clustering eigenvalues into one spectrum point.
    pub eig_dedup_radius: f64,
    /// Norm below which a vector (or residual) counts as zero.
    pub zero_vec_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            rank_factor: 1.0,
            eig_dedup_radius: 1e-8,
            zero_vec_tol: 1e-10,
        }
    }
}

impl ToleranceConfig {
    /// Singular-value cutoff for a matrix of the given shape.
    pub fn rank_threshold(&self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        self.rank_factor * rows.max(cols) as f64 * sigma_max * f64::EPSILON
    }

    /// All tolerances must be strictly positive.
    pub fn validate(&self) -> Result<(), SpecViolation> {
        if self.rank_factor > 0.0 && self.eig_dedup_radius > 0.0 && self.zero_vec_tol > 0.0 {
            Ok(())
        } else {
            Err(SpecViolation::NonPositiveTolerance)
        }
    }
}

/// One node's LTI dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSystem {
    /// State matrix, `n x n`.
    pub a: Array2<f64>,
    /// Input matrix, `n x p`.
    pub b: Array2<f64>,
    /// Output matrix, `m x n`.
    pub c: Array2<f64>,
    pub label: String,
}

impl NodeSystem {
    pub fn new(a: Array2<f64>, b: Array2<f64>, c: Array2<f64>, label: impl Into<String>) -> Self {
        Self {
            a,
            b,
            c,
            label: label.into(),
        }
    }
}

/// A heterogeneous network: node dynamics, weighted adjacency `W`, inner
/// coupling `H`, and the driver indicator vector `delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    pub nodes: Vec<NodeSystem>,
    /// `w[(i, j)]` is the weight of edge `j -> i`; zero diagonal.
    pub w: Array2<f64>,
    /// Inner coupling, `n x m`.
    pub h: Array2<f64>,
    /// Driver indicators, entries in `{0, 1}`.
    pub delta: Vec<u8>,
}

/// A broken [`NetworkSpec`] invariant. Violations are data, not failures:
/// [`validate`](NetworkSpec::validate) reports all of them at once.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecViolation {
    #[error("nodes: network has no nodes")]
    NoNodes,
    #[error("nodes[{node}].A: state matrix is {rows}x{cols}, expected square")]
    NonSquareA { node: usize, rows: usize, cols: usize },
    #[error("nodes[{node}].B: input matrix has {rows} rows, expected {expected}")]
    BRowMismatch { node: usize, rows: usize, expected: usize },
    #[error("nodes[{node}].C: output matrix has {cols} columns, expected {expected}")]
    CColMismatch { node: usize, cols: usize, expected: usize },
    #[error("nodes[{node}]: dimensions ({n}, {p}, {m}) differ from node 0's ({n0}, {p0}, {m0})")]
    MixedDimensions {
        node: usize,
        n: usize,
        p: usize,
        m: usize,
        n0: usize,
        p0: usize,
        m0: usize,
    },
    #[error("W: adjacency is {rows}x{cols}, expected {n}x{n}")]
    WShapeMismatch { rows: usize, cols: usize, n: usize },
    #[error("W: self-loop at node {node} (diagonal entry {value})")]
    SelfLoop { node: usize, value: f64 },
    #[error("H: coupling is {rows}x{cols}, expected {n}x{m}")]
    HShapeMismatch { rows: usize, cols: usize, n: usize, m: usize },
    #[error("delta: has {len} entries, expected {n}")]
    DeltaLength { len: usize, n: usize },
    #[error("delta[{index}]: value {value} is not 0 or 1")]
    DeltaNotBinary { index: usize, value: u8 },
    #[error("nodes[{node}]: companion coefficient vector has length {len}, expected {expected}")]
    CompanionLength { node: usize, len: usize, expected: usize },
    #[error("tolerances: all tolerance fields must be strictly positive")]
    NonPositiveTolerance,
}

/// Returned when an operation requires a valid spec and got violations.
#[derive(Debug, Clone, Error)]
#[error("invalid network spec: {}", .violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
pub struct InvalidSpec {
    pub violations: Vec<SpecViolation>,
}

/// The assembled `Nn`-dimensional pair `(Phi, Psi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedSystem {
    pub phi: Array2<f64>,
    pub psi: Array2<f64>,
    /// `(N, n, p)`.
    pub block_dims: (usize, usize, usize),
}

impl NetworkSpec {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Shared `(n, p, m)` of the nodes, taken from node 0.
    pub fn dims(&self) -> (usize, usize, usize) {
        let first = &self.nodes[0];
        (first.a.nrows(), first.b.ncols(), first.c.nrows())
    }

    /// Indices of driven nodes.
    pub fn driven(&self) -> Vec<usize> {
        self.delta
            .iter()
            .enumerate()
            .filter(|(_, &d)| d != 0)
            .map(|(i, _)| i)
            .collect()
    }

    /// `Delta = diag(delta)` as an `N x N` matrix.
    pub fn delta_matrix(&self) -> Array2<f64> {
        Array2::from_diag(&self.delta.iter().map(|&d| f64::from(d)).collect::<ndarray::Array1<f64>>())
    }

    /// Check every invariant; the list is empty iff the spec is valid.
    pub fn validate(&self) -> Vec<SpecViolation> {
        let mut violations = Vec::new();
        if self.nodes.is_empty() {
            violations.push(SpecViolation::NoNodes);
            return violations;
        }
        let (n0, p0, m0) = self.dims();
        for (i, node) in self.nodes.iter().enumerate() {
            if node.a.nrows() != node.a.ncols() {
                violations.push(SpecViolation::NonSquareA {
                    node: i,
                    rows: node.a.nrows(),
                    cols: node.a.ncols(),
                });
                continue;
            }
            let n = node.a.nrows();
            if node.b.nrows() != n {
                violations.push(SpecViolation::BRowMismatch {
                    node: i,
                    rows: node.b.nrows(),
                    expected: n,
                });
            }
            if node.c.ncols() != n {
                violations.push(SpecViolation::CColMismatch {
                    node: i,
                    cols: node.c.ncols(),
                    expected: n,
                });
            }
            let (p, m) = (node.b.ncols(), node.c.nrows());
            if (n, p, m) != (n0, p0, m0) {
                violations.push(SpecViolation::MixedDimensions {
                    node: i,
                    n,
                    p,
                    m,
                    n0,
                    p0,
                    m0,
                });
            }
        }
        let n_nodes = self.nodes.len();
        if self.w.nrows() != n_nodes || self.w.ncols() != n_nodes {
            violations.push(SpecViolation::WShapeMismatch {
                rows: self.w.nrows(),
                cols: self.w.ncols(),
                n: n_nodes,
            });
        } else {
            for k in 0..n_nodes {
                if self.w[(k, k)] != 0.0 {
                    violations.push(SpecViolation::SelfLoop {
                        node: k,
                        value: self.w[(k, k)],
                    });
                }
            }
        }
        if self.h.nrows() != n0 || self.h.ncols() != m0 {
            violations.push(SpecViolation::HShapeMismatch {
                rows: self.h.nrows(),
                cols: self.h.ncols(),
                n: n0,
                m: m0,
            });
        }
        if self.delta.len() != n_nodes {
            violations.push(SpecViolation::DeltaLength {
                len: self.delta.len(),
                n: n_nodes,
            });
        }
        for (i, &d) in self.delta.iter().enumerate() {
            if d > 1 {
                violations.push(SpecViolation::DeltaNotBinary { index: i, value: d });
            }
        }
        violations
    }

    fn ensure_valid(&self) -> Result<(), InvalidSpec> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(InvalidSpec { violations })
        }
    }

    /// Assemble the lifted pair `(Phi, Psi)`.
    ///
    /// Assembly is exact arithmetic on the input entries; two calls on equal
    /// specs produce bitwise-equal matrices.
    pub fn build_lifted(&self) -> Result<LiftedSystem, InvalidSpec> {
        self.ensure_valid()?;
        let n_nodes = self.node_count();
        let (n, p, _) = self.dims();
        let mut phi = Array2::<f64>::zeros((n_nodes * n, n_nodes * n));
        let mut psi = Array2::<f64>::zeros((n_nodes * n, n_nodes * p));
        for i in 0..n_nodes {
            phi.slice_mut(ndarray::s![i * n..(i + 1) * n, i * n..(i + 1) * n])
                .assign(&self.nodes[i].a);
            if self.delta[i] != 0 {
                psi.slice_mut(ndarray::s![i * n..(i + 1) * n, i * p..(i + 1) * p])
                    .assign(&self.nodes[i].b);
            }
            for j in 0..n_nodes {
                if i == j || self.w[(i, j)] == 0.0 {
                    continue;
                }
                let coupling = self.h.dot(&self.nodes[j].c) * self.w[(i, j)];
                phi.slice_mut(ndarray::s![i * n..(i + 1) * n, j * n..(j + 1) * n])
                    .assign(&coupling);
            }
        }
        Ok(LiftedSystem {
            phi,
            psi,
            block_dims: (n_nodes, n, p),
        })
    }

    /// Copy of the spec with every node's dynamics replaced by node 0's.
    /// Idempotent; labels are preserved.
    pub fn homogenize(&self) -> NetworkSpec {
        let base = self.nodes[0].clone();
        let nodes = self
            .nodes
            .iter()
            .map(|node| NodeSystem {
                a: base.a.clone(),
                b: base.b.clone(),
                c: base.c.clone(),
                label: node.label.clone(),
            })
            .collect();
        NetworkSpec {
            nodes,
            w: self.w.clone(),
            h: self.h.clone(),
            delta: self.delta.clone(),
        }
    }

    /// The block row `[-w_i1 H C_1, ..., s I - A_i, ..., -w_iN H C_N]`
    /// of `s I - Phi`, used by the uncontrolled-node row-rank test.
    pub fn uncontrolled_block_row(&self, i: usize, s: ndarray_linalg::c64) -> Array2<ndarray_linalg::c64> {
        let n_nodes = self.node_count();
        let (n, _, _) = self.dims();
        let mut row = Array2::<ndarray_linalg::c64>::zeros((n, n_nodes * n));
        for j in 0..n_nodes {
            let mut block = row.slice_mut(ndarray::s![.., j * n..(j + 1) * n]);
            if j == i {
                for (r, c) in ndarray::indices((n, n)) {
                    let diag = if r == c { s } else { ndarray_linalg::c64::new(0.0, 0.0) };
                    block[(r, c)] = diag - self.nodes[i].a[(r, c)];
                }
            } else if self.w[(i, j)] != 0.0 {
                let coupling = self.h.dot(&self.nodes[j].c) * (-self.w[(i, j)]);
                for (r, c) in ndarray::indices((n, n)) {
                    block[(r, c)] = ndarray_linalg::c64::new(coupling[(r, c)], 0.0);
                }
            }
        }
        row
    }
}

/// Convenience: view of `Phi` restricted to diagonal block `i`.
pub fn diagonal_block<'a>(lifted: &'a LiftedSystem, i: usize) -> ArrayView2<'a, f64> {
    let (_, n, _) = lifted.block_dims;
    lifted.phi.slice(ndarray::s![i * n..(i + 1) * n, i * n..(i + 1) * n])
}
