//! Shared fixtures and independent oracles for the integration suites.
//!
//! Everything here stays independent of the library's decision paths: the
//! rational rank oracle runs exact fraction arithmetic, and the random
//! generators only use the public constructors.

#![allow(dead_code)]

use ndarray::{array, Array1, Array2};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::rngs::StdRng;
use rand::Rng;

use netctrl::model::{NetworkSpec, NodeSystem};
use netctrl::structured::{CompanionNode, StructuredNetworkSpec};

/// Exact rank over the rationals by Gaussian elimination with full pivoting.
pub fn rational_rank(entries: &[Vec<i64>]) -> usize {
    let rows = entries.len();
    if rows == 0 {
        return 0;
    }
    let cols = entries[0].len();
    let mut m: Vec<Vec<BigRational>> = entries
        .iter()
        .map(|row| {
            row.iter()
                .map(|&x| BigRational::from_integer(BigInt::from(x)))
                .collect()
        })
        .collect();
    let mut rank = 0usize;
    let mut row = 0usize;
    for col in 0..cols {
        // Find a pivot with the largest magnitude for determinism.
        let pivot = (row..rows)
            .filter(|&r| !m[r][col].is_zero())
            .max_by(|&a, &b| m[a][col].abs().cmp(&m[b][col].abs()));
        let Some(pivot) = pivot else { continue };
        m.swap(row, pivot);
        let lead = m[row][col].clone();
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let factor = &m[r][col] / &lead;
                for c in col..cols {
                    let sub = &m[row][c] * &factor;
                    m[r][c] -= sub;
                }
            }
        }
        rank += 1;
        row += 1;
        if row == rows {
            break;
        }
    }
    rank
}

/// Example 1's shared matrices (identical across the three chain nodes).
pub fn example1_homogeneous() -> NetworkSpec {
    let a = array![[1.0, 0.0], [2.0, 1.0]];
    let b = array![[1.0, 2.0], [0.0, 1.0]];
    let c = array![[1.0, 0.0], [0.0, 2.0]];
    NetworkSpec {
        nodes: (1..=3)
            .map(|i| NodeSystem::new(a.clone(), b.clone(), c.clone(), i.to_string()))
            .collect(),
        w: chain_w(3),
        h: Array2::eye(2),
        delta: vec![1, 0, 0],
    }
}

/// Example 1's heterogeneous variant.
pub fn example1_heterogeneous() -> NetworkSpec {
    let nodes = vec![
        NodeSystem::new(
            array![[1.0, 0.0], [2.0, 1.0]],
            array![[1.0, 0.0], [0.0, 1.0]],
            array![[0.0, 1.0], [0.0, 0.0]],
            "1",
        ),
        NodeSystem::new(
            array![[1.0, 0.0], [0.0, 1.0]],
            array![[1.0, 0.0], [0.0, 2.0]],
            array![[0.0, 2.0], [0.0, 0.0]],
            "2",
        ),
        NodeSystem::new(
            array![[1.0, 2.0], [0.0, 1.0]],
            array![[2.0, 0.0], [0.0, 1.0]],
            array![[0.0, 3.0], [0.0, 0.0]],
            "3",
        ),
    ];
    NetworkSpec {
        nodes,
        w: chain_w(3),
        h: Array2::eye(2),
        delta: vec![1, 0, 0],
    }
}

/// Example 2's heterogeneous variant (directed tree, root driven).
pub fn example2_heterogeneous() -> NetworkSpec {
    let nodes = vec![
        NodeSystem::new(
            array![[0.0, 1.0], [2.0, 0.0]],
            array![[1.0, 0.0], [0.0, 1.0]],
            array![[0.0, 1.0], [1.0, 0.0]],
            "1",
        ),
        NodeSystem::new(
            array![[1.0, 3.0], [0.0, 1.0]],
            array![[2.0, 0.0], [0.0, 1.0]],
            array![[2.0, 1.0], [1.0, 3.0]],
            "2",
        ),
        NodeSystem::new(
            array![[2.0, 3.0], [0.0, 2.0]],
            array![[1.0, 0.0], [0.0, 3.0]],
            array![[3.0, 1.0], [1.0, 0.0]],
            "3",
        ),
    ];
    NetworkSpec {
        nodes,
        w: star_w(3),
        h: array![[0.0, 1.0], [1.0, 0.0]],
        delta: vec![1, 0, 0],
    }
}

/// Example 2's homogeneous variant: node 1's dynamics everywhere.
pub fn example2_homogeneous() -> NetworkSpec {
    example2_heterogeneous().homogenize()
}

/// Adjacency of the chain `1 -> 2 -> ... -> N` with unit weights.
pub fn chain_w(n: usize) -> Array2<f64> {
    let mut w = Array2::zeros((n, n));
    for k in 0..n - 1 {
        w[(k + 1, k)] = 1.0;
    }
    w
}

/// Adjacency of the star `1 -> k` with unit weights.
pub fn star_w(n: usize) -> Array2<f64> {
    let mut w = Array2::zeros((n, n));
    for k in 1..n {
        w[(k, 0)] = 1.0;
    }
    w
}

pub fn random_matrix(rng: &mut StdRng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| rng.gen_range(-1.0..1.0))
}

/// Random adjacency with edge probability `p` and weights away from zero.
pub fn random_w(rng: &mut StdRng, n: usize, p: f64) -> Array2<f64> {
    let mut w = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.gen_bool(p) {
                let magnitude = rng.gen_range(0.5..1.5);
                w[(i, j)] = if rng.gen_bool(0.5) { magnitude } else { -magnitude };
            }
        }
    }
    w
}

pub fn random_delta(rng: &mut StdRng, n: usize) -> Vec<u8> {
    (0..n).map(|_| u8::from(rng.gen_bool(0.5))).collect()
}

/// Random general spec: `N <= 5`, `n <= 3`, mixed drivers, heterogeneous or
/// homogeneous node dynamics.
pub fn random_spec(rng: &mut StdRng) -> NetworkSpec {
    let n_nodes = rng.gen_range(1..=5);
    let n = rng.gen_range(1..=3);
    let p = rng.gen_range(1..=2);
    let m = rng.gen_range(1..=2);
    let homogeneous = rng.gen_bool(0.3);
    let base = NodeSystem::new(
        random_matrix(rng, n, n),
        random_matrix(rng, n, p),
        random_matrix(rng, m, n),
        "1",
    );
    let nodes: Vec<NodeSystem> = (0..n_nodes)
        .map(|i| {
            if homogeneous {
                NodeSystem { label: (i + 1).to_string(), ..base.clone() }
            } else {
                NodeSystem::new(
                    random_matrix(rng, n, n),
                    random_matrix(rng, n, p),
                    random_matrix(rng, m, n),
                    (i + 1).to_string(),
                )
            }
        })
        .collect();
    NetworkSpec {
        nodes,
        w: random_w(rng, n_nodes, 0.5),
        h: random_matrix(rng, n, m),
        delta: random_delta(rng, n_nodes),
    }
}

/// Random structured spec with `|nu| < N`.
pub fn random_structured(rng: &mut StdRng, max_nodes: usize, max_state: usize) -> StructuredNetworkSpec {
    let n_nodes = rng.gen_range(2..=max_nodes.max(2));
    let n = rng.gen_range(1..=max_state.max(1));
    let driven_count = rng.gen_range(0..n_nodes);
    let mut delta = vec![0u8; n_nodes];
    let mut chosen: Vec<usize> = (0..n_nodes).collect();
    for _ in 0..driven_count {
        let pick = rng.gen_range(0..chosen.len());
        delta[chosen.swap_remove(pick)] = 1;
    }
    let sparse_coupling = rng.gen_bool(0.3);
    let mut h = Array1::from_shape_fn(n, |_| rng.gen_range(-1.0..1.0));
    let mut c = Array1::from_shape_fn(n, |_| rng.gen_range(-1.0..1.0));
    if sparse_coupling {
        for k in 0..n - 1 {
            h[k] = 0.0;
        }
        for k in 1..n {
            c[k] = 0.0;
        }
        h[n - 1] = 1.0;
        c[0] = 1.0;
    }
    StructuredNetworkSpec {
        nodes: (0..n_nodes)
            .map(|_| CompanionNode { a: (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect() })
            .collect(),
        w: random_w(rng, n_nodes, 0.5),
        h,
        c,
        delta,
    }
}

/// Spec matching the chain corollary's pattern: superdiagonal node
/// dynamics with nonzero coefficients, coupling through the last state from
/// the neighbor's first output, root input `B_1 = e_n`, root driven.
pub fn corollary1_chain_spec(n_nodes: usize, state: usize, rng: &mut StdRng) -> NetworkSpec {
    let nonzero = |rng: &mut StdRng| {
        let magnitude = rng.gen_range(0.5..1.5);
        if rng.gen_bool(0.5) { magnitude } else { -magnitude }
    };
    let mut w = Array2::zeros((n_nodes, n_nodes));
    for k in 0..n_nodes - 1 {
        w[(k + 1, k)] = nonzero(rng);
    }
    let mut h = Array2::zeros((state, 1));
    h[(state - 1, 0)] = 1.0;
    let nodes = (0..n_nodes)
        .map(|i| {
            let mut a = Array2::zeros((state, state));
            for k in 0..state - 1 {
                a[(k, k + 1)] = nonzero(rng);
            }
            let b = if i == 0 {
                let mut b = Array2::zeros((state, 1));
                b[(state - 1, 0)] = 1.0;
                b
            } else {
                random_matrix(rng, state, 1)
            };
            let mut c = Array2::zeros((1, state));
            c[(0, 0)] = nonzero(rng);
            NodeSystem::new(a, b, c, (i + 1).to_string())
        })
        .collect();
    let mut delta = vec![0u8; n_nodes];
    delta[0] = 1;
    NetworkSpec { nodes, w, h, delta }
}

/// Norm of a complex vector.
pub fn cnorm(v: &Array1<netctrl::c64>) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}
