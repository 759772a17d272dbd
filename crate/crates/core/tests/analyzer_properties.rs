//! Property suites tying the criterion checkers to the direct PBH oracle on
//! the lifted system, and the necessity results to the exact verdict.

mod support;

use ndarray::Array2;
use netctrl::analyzers::{
    check_chain_corollary1, check_observability_theorem3, check_rowrank_theorem2,
    check_source_corollary2, check_theorem1, check_topology, check_topology_necessity_theorem4,
    Verdict,
};
use netctrl::graph::{generate, Topology, TopologyKind, WeightDist};
use netctrl::model::{NetworkSpec, ToleranceConfig};
use netctrl::numerics::{complex, pbh_controllable};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use support::*;

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

/// Direct PBH on the assembled lifted pair: the oracle for every exact
/// criterion.
fn lifted_pbh_verdict(spec: &NetworkSpec) -> bool {
    let lifted = spec.build_lifted().unwrap();
    let phi = complex(&lifted.phi.view());
    let psi = complex(&lifted.psi.view());
    pbh_controllable(&phi.view(), &psi.view(), &tol()).unwrap().0
}

#[test]
fn theorem1_matches_lifted_pbh_on_random_specs() {
    let mut rng = StdRng::seed_from_u64(101);
    let mut controllable = 0usize;
    let mut uncontrollable = 0usize;
    for trial in 0..220 {
        let spec = random_spec(&mut rng);
        let verdict = check_theorem1(&spec, &tol()).unwrap().verdict;
        let oracle = lifted_pbh_verdict(&spec);
        let expected = if oracle { Verdict::Controllable } else { Verdict::Uncontrollable };
        assert_eq!(verdict, expected, "trial {trial}");
        if oracle {
            controllable += 1;
        } else {
            uncontrollable += 1;
        }
    }
    // Both outcomes must actually occur for the comparison to mean anything.
    assert!(controllable >= 20, "controllable cases: {controllable}");
    assert!(uncontrollable >= 20, "uncontrollable cases: {uncontrollable}");
}

#[test]
fn corollary1_is_iff_under_its_pattern() {
    let mut rng = StdRng::seed_from_u64(103);
    for trial in 0..60 {
        let n_nodes = rng.gen_range(2..=4);
        let state = rng.gen_range(1..=3);
        let mut spec = corollary1_chain_spec(n_nodes, state, &mut rng);
        // Place zero or one driver anywhere.
        let mut delta = vec![0u8; n_nodes];
        if rng.gen_bool(0.8) {
            delta[rng.gen_range(0..n_nodes)] = 1;
        }
        spec.delta = delta.clone();
        let report = check_chain_corollary1(&spec, &tol()).unwrap();
        let expected = if delta.iter().take(1).sum::<u8>() == 1 && delta.iter().sum::<u8>() == 1 {
            Verdict::Controllable
        } else {
            Verdict::Uncontrollable
        };
        assert_eq!(report.verdict, expected, "trial {trial}");
        let oracle = lifted_pbh_verdict(&spec);
        assert_eq!(report.verdict == Verdict::Controllable, oracle, "trial {trial} oracle");
    }
}

#[test]
fn corollary1_rejects_broken_patterns() {
    let mut rng = StdRng::seed_from_u64(105);
    let mut spec = corollary1_chain_spec(3, 2, &mut rng);
    spec.nodes[1].a[(1, 0)] = 0.7; // subdiagonal entry breaks the form
    assert_eq!(
        check_chain_corollary1(&spec, &tol()).unwrap().verdict,
        Verdict::NotApplicable
    );
    let mut spec = corollary1_chain_spec(3, 2, &mut rng);
    spec.nodes[0].b[(0, 0)] = 1.0; // B_1 no longer e_n
    assert_eq!(
        check_chain_corollary1(&spec, &tol()).unwrap().verdict,
        Verdict::NotApplicable
    );
}

#[test]
fn necessity_checkers_pass_on_controllable_specs() {
    let mut rng = StdRng::seed_from_u64(107);
    let mut exercised = 0usize;
    let mut trials = 0usize;
    while exercised < 200 && trials < 2000 {
        trials += 1;
        let spec = random_spec(&mut rng);
        if check_theorem1(&spec, &tol()).unwrap().verdict != Verdict::Controllable {
            continue;
        }
        exercised += 1;
        let c2 = check_source_corollary2(&spec, &tol()).unwrap();
        assert_ne!(
            c2.verdict,
            Verdict::NecessaryConditionFailed,
            "corollary 2 contradicts a controllable verdict: {:?}",
            c2.notes
        );
        let t2 = check_rowrank_theorem2(&spec, &tol()).unwrap();
        assert_ne!(
            t2.verdict,
            Verdict::NecessaryConditionFailed,
            "theorem 2 contradicts a controllable verdict: {:?}",
            t2.notes
        );
        let t3 = check_observability_theorem3(&spec, &tol()).unwrap();
        assert_ne!(
            t3.verdict,
            Verdict::NecessaryConditionFailed,
            "theorem 3 contradicts a controllable verdict: {:?}",
            t3.notes
        );
        let t4 = check_topology_necessity_theorem4(&spec, &tol()).unwrap();
        assert_ne!(
            t4.verdict,
            Verdict::Uncontrollable,
            "theorem 4 contradicts a controllable verdict: {:?}",
            t4.notes
        );
    }
    assert!(exercised >= 200, "controllable specs exercised: {exercised}");
}

#[test]
fn theorem4_uncontrollable_implies_theorem1_uncontrollable() {
    let mut rng = StdRng::seed_from_u64(109);
    let mut hits = 0usize;
    for _ in 0..400 {
        let mut spec = random_spec(&mut rng);
        spec = spec.homogenize();
        let t4 = check_topology_necessity_theorem4(&spec, &tol()).unwrap();
        if t4.verdict == Verdict::Uncontrollable {
            hits += 1;
            assert_eq!(
                check_theorem1(&spec, &tol()).unwrap().verdict,
                Verdict::Uncontrollable
            );
        }
    }
    assert!(hits >= 10, "theorem 4 uncontrollable cases: {hits}");
}

#[test]
fn homogeneous_topology_uncontrollable_implies_system_uncontrollable() {
    let mut rng = StdRng::seed_from_u64(113);
    let mut hits = 0usize;
    for _ in 0..300 {
        let spec = random_spec(&mut rng).homogenize();
        let topology = check_topology(&spec, &tol()).unwrap();
        if topology.verdict == Verdict::Uncontrollable {
            hits += 1;
            assert_eq!(
                check_theorem1(&spec, &tol()).unwrap().verdict,
                Verdict::Uncontrollable,
                "homogeneous network with uncontrollable topology must be uncontrollable"
            );
        }
    }
    assert!(hits >= 10);
}

#[test]
fn unreachable_nodes_imply_uncontrollable() {
    let mut rng = StdRng::seed_from_u64(127);
    let mut screened = 0usize;
    for _ in 0..200 {
        let n_nodes = rng.gen_range(2..=5);
        let topology = generate(
            TopologyKind::RandomDirected { p: 0.3, weights: WeightDist::default() },
            n_nodes,
            rng.gen(),
        )
        .unwrap();
        let mut spec = random_spec_on(&mut rng, &topology);
        let drivers: Vec<usize> = spec.driven();
        if drivers.is_empty() {
            spec.delta[0] = 1;
        }
        let drivers = spec.driven();
        let reached = topology.reachable_from(&drivers);
        if reached.len() == n_nodes {
            continue;
        }
        screened += 1;
        assert_eq!(
            check_theorem1(&spec, &tol()).unwrap().verdict,
            Verdict::Uncontrollable,
            "unreachable node must make the network uncontrollable"
        );
    }
    assert!(screened >= 30, "screened cases: {screened}");
}

#[test]
fn sources_match_zero_rows_on_random_topologies() {
    let mut rng = StdRng::seed_from_u64(131);
    for _ in 0..50 {
        let n_nodes = rng.gen_range(1..=6);
        let topology = generate(
            TopologyKind::RandomDirected { p: 0.4, weights: WeightDist::default() },
            n_nodes,
            rng.gen(),
        )
        .unwrap();
        let w = topology.to_adjacency();
        let zero_rows: Vec<usize> = (0..n_nodes)
            .filter(|&i| (0..n_nodes).all(|j| w[(i, j)] == 0.0))
            .collect();
        assert_eq!(topology.sources(), zero_rows);
    }
}

#[test]
fn chain_adjacency_has_subdiagonal_nonzeros() {
    for n in 1..=6 {
        let t = generate(TopologyKind::Chain, n, 0).unwrap();
        let w = t.to_adjacency();
        let nonzeros: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| w[(i, j)] != 0.0)
            .collect();
        assert_eq!(nonzeros.len(), n - 1);
        assert!(nonzeros.iter().all(|&(i, j)| i == j + 1));
    }
}

#[test]
fn lifted_scaling_property() {
    // Scaling W scales the coupling blocks and leaves Lambda and Psi alone.
    let mut rng = StdRng::seed_from_u64(137);
    for _ in 0..20 {
        let spec = random_spec(&mut rng);
        let mut scaled = spec.clone();
        scaled.w.mapv_inplace(|x| 2.5 * x);
        let base = spec.build_lifted().unwrap();
        let scaled_lifted = scaled.build_lifted().unwrap();
        assert_eq!(base.psi, scaled_lifted.psi);
        let (n_nodes, n, _) = base.block_dims;
        for i in 0..n_nodes {
            for j in 0..n_nodes {
                let b0 = base.phi.slice(ndarray::s![i * n..(i + 1) * n, j * n..(j + 1) * n]);
                let b1 = scaled_lifted
                    .phi
                    .slice(ndarray::s![i * n..(i + 1) * n, j * n..(j + 1) * n]);
                if i == j {
                    assert_eq!(b0, b1);
                } else {
                    let expected = b0.mapv(|x| 2.5 * x);
                    let diff = (&b1 - &expected).iter().map(|x| x.abs()).fold(0.0, f64::max);
                    assert!(diff < 1e-12);
                }
            }
        }
    }
}

#[test]
fn element_by_element_assembly_oracle() {
    // Independent per-entry assembly of a random 2-node lifted system.
    let mut rng = StdRng::seed_from_u64(139);
    for _ in 0..20 {
        let mut spec = random_spec(&mut rng);
        while spec.node_count() < 2 {
            spec = random_spec(&mut rng);
        }
        let lifted = spec.build_lifted().unwrap();
        let (n_nodes, n, p) = lifted.block_dims;
        for row in 0..n_nodes * n {
            let (i, r) = (row / n, row % n);
            for col in 0..n_nodes * n {
                let (j, c) = (col / n, col % n);
                let expected = if i == j {
                    spec.nodes[i].a[(r, c)]
                } else {
                    // (w_ij H C_j)[(r, c)]
                    let m = spec.nodes[j].c.nrows();
                    (0..m).map(|k| spec.w[(i, j)] * spec.h[(r, k)] * spec.nodes[j].c[(k, c)]).sum()
                };
                let got = lifted.phi[(row, col)];
                assert!((got - expected).abs() < 1e-12, "phi[{row}][{col}]");
            }
            for col in 0..n_nodes * p {
                let (j, c) = (col / p, col % p);
                let expected = if i == j {
                    f64::from(spec.delta[i]) * spec.nodes[i].b[(r, c)]
                } else {
                    0.0
                };
                assert_eq!(lifted.psi[(row, col)], expected);
            }
        }
    }
}

/// Random node dynamics over a given topology.
fn random_spec_on(rng: &mut StdRng, topology: &Topology) -> NetworkSpec {
    let n = rng.gen_range(1..=3);
    let m = rng.gen_range(1..=2);
    let p = rng.gen_range(1..=2);
    let nodes = (0..topology.node_count)
        .map(|i| {
            netctrl::model::NodeSystem::new(
                random_matrix(rng, n, n),
                random_matrix(rng, n, p),
                random_matrix(rng, m, n),
                (i + 1).to_string(),
            )
        })
        .collect();
    NetworkSpec {
        nodes,
        w: topology.to_adjacency(),
        h: random_matrix(rng, n, m),
        delta: random_delta(rng, topology.node_count),
    }
}
