//! Companion-form node systems under state feedback: one-dimensional
//! communication networks, the exact four-condition criterion, the
//! structured-coupling sufficiency result, and the diagonalizable-topology
//! criterion.
//!
//! After feedback `u_i = a_i^T x_i + delta_i u_oi` every node shares the
//! upper-shift state matrix `A` and input `B = e_n`, so the lifted pair is
//! `Phi = I_N (x) A + W (x) H C` and `Psi = Delta (x) B`.

use ndarray::{Array1, Array2};
use ndarray_linalg::{c64, Inverse, Solve};

use crate::analyzers::{fmt_c, AnalyzerError, ControllabilityReport, Criterion, Result, Verdict};
use crate::model::{InvalidSpec, LiftedSystem, NetworkSpec, NodeSystem, SpecViolation, ToleranceConfig};
use crate::numerics::{
    complex, left_eigenspace, left_nullspace, left_nullspace_floor, observable,
    pbh_controllable, pbh_pencil, pbh_test_points, rank_of, right_nullspace, spectrum,
    PbhWitness,
};

/// One node in companion form: `A_i` is the companion matrix whose last row
/// is `-a^T`, and `B_i = e_n`. The feedback `u_i = a_i^T x_i + delta_i u_oi`
/// cancels the last row, leaving the upper-shift matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CompanionNode {
    /// Characteristic coefficients `[a_0, ..., a_{n-1}]`.
    pub a: Vec<f64>,
}

impl CompanionNode {
    /// The node's open-loop state matrix (companion form).
    pub fn state_matrix(&self) -> Array2<f64> {
        let n = self.a.len();
        let mut m = shift_matrix(n);
        for k in 0..n {
            m[(n - 1, k)] = -self.a[k];
        }
        m
    }
}

/// Upper-shift matrix: ones on the superdiagonal.
pub fn shift_matrix(n: usize) -> Array2<f64> {
    let mut m = Array2::zeros((n, n));
    for k in 0..n.saturating_sub(1) {
        m[(k, k + 1)] = 1.0;
    }
    m
}

/// `e_n` as an `n x 1` input column.
pub fn unit_input(n: usize) -> Array2<f64> {
    let mut b = Array2::zeros((n, 1));
    b[(n - 1, 0)] = 1.0;
    b
}

/// A network of companion-form nodes with one-dimensional communication:
/// scalar input per node, coupling column `H` and output row `C` shared by
/// all nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredNetworkSpec {
    pub nodes: Vec<CompanionNode>,
    pub w: Array2<f64>,
    /// Coupling column, length `n`.
    pub h: Array1<f64>,
    /// Output row, length `n`.
    pub c: Array1<f64>,
    pub delta: Vec<u8>,
}

/// The per-node solution spaces of the exact criterion at a spectrum point
/// `s` of the shift matrix: the left eigenspace for undriven nodes, and its
/// intersection with the annihilator of `B` for driven nodes.
#[derive(Debug, Clone)]
pub struct AlphaSpace {
    pub s: c64,
    /// One basis per node.
    pub node_bases: Vec<Vec<Array1<c64>>>,
}

impl StructuredNetworkSpec {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn state_dim(&self) -> usize {
        self.nodes.first().map(|node| node.a.len()).unwrap_or(0)
    }

    /// Indices of driven nodes (the set `nu`).
    pub fn driven(&self) -> Vec<usize> {
        self.delta
            .iter()
            .enumerate()
            .filter(|(_, &d)| d != 0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn validate(&self) -> Vec<SpecViolation> {
        let mut violations = Vec::new();
        if self.nodes.is_empty() {
            violations.push(SpecViolation::NoNodes);
            return violations;
        }
        let n = self.state_dim();
        if n == 0 {
            violations.push(SpecViolation::CompanionLength {
                node: 0,
                len: 0,
                expected: 1,
            });
        }
        for (i, node) in self.nodes.iter().enumerate() {
            if node.a.len() != n || node.a.is_empty() {
                violations.push(SpecViolation::CompanionLength {
                    node: i,
                    len: node.a.len(),
                    expected: n.max(1),
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
        if self.h.len() != n {
            violations.push(SpecViolation::HShapeMismatch {
                rows: self.h.len(),
                cols: 1,
                n,
                m: 1,
            });
        }
        if self.c.len() != n {
            violations.push(SpecViolation::CColMismatch {
                node: 0,
                cols: self.c.len(),
                expected: n,
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

    fn ensure_valid(&self) -> std::result::Result<(), InvalidSpec> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(InvalidSpec { violations })
        }
    }

    /// Kronecker assembly `Phi = I_N (x) A + W (x) H C`, `Psi = Delta (x) B`.
    pub fn build_lifted(&self) -> std::result::Result<LiftedSystem, InvalidSpec> {
        self.ensure_valid()?;
        let n_nodes = self.node_count();
        let n = self.state_dim();
        let a = shift_matrix(n);
        let hc = coupling_product(&self.h, &self.c);
        let mut phi = Array2::<f64>::zeros((n_nodes * n, n_nodes * n));
        let mut psi = Array2::<f64>::zeros((n_nodes * n, n_nodes));
        for i in 0..n_nodes {
            for j in 0..n_nodes {
                let mut block =
                    phi.slice_mut(ndarray::s![i * n..(i + 1) * n, j * n..(j + 1) * n]);
                if i == j {
                    block.assign(&a);
                }
                if self.w[(i, j)] != 0.0 {
                    block.scaled_add(self.w[(i, j)], &hc);
                }
            }
            if self.delta[i] != 0 {
                psi[(i * n + n - 1, i)] = 1.0;
            }
        }
        Ok(LiftedSystem {
            phi,
            psi,
            block_dims: (n_nodes, n, 1),
        })
    }

    /// Bridge to the general model: every node becomes `(A, e_n, C)` with the
    /// shared shift matrix, and `H` becomes an `n x 1` coupling column. The
    /// lifted system of the result equals [`build_lifted`](Self::build_lifted).
    pub fn as_network_spec(&self) -> NetworkSpec {
        let n = self.state_dim();
        let a = shift_matrix(n);
        let b = unit_input(n);
        let c = self
            .c
            .view()
            .insert_axis(ndarray::Axis(0))
            .to_owned();
        let h = self
            .h
            .view()
            .insert_axis(ndarray::Axis(1))
            .to_owned();
        NetworkSpec {
            nodes: (0..self.node_count())
                .map(|i| NodeSystem::new(a.clone(), b.clone(), c.clone(), (i + 1).to_string()))
                .collect(),
            w: self.w.clone(),
            h,
            delta: self.delta.clone(),
        }
    }

    /// The per-node solution spaces at `s`.
    pub fn alpha_space(&self, s: c64, tol: &ToleranceConfig) -> Result<AlphaSpace> {
        let n = self.state_dim();
        let a = complex(&shift_matrix(n).view());
        let b = complex(&unit_input(n).view());
        let eigen_basis = left_eigenspace(&a.view(), s, tol)?;
        let pencil = pbh_pencil(&a.view(), &b.view(), s);
        let scale = 1.0_f64.max(s.norm() + 1.0);
        let annihilating_basis =
            left_nullspace_floor(&pencil.view(), tol, tol.zero_vec_tol * scale)?;
        let driven = self.driven();
        let node_bases = (0..self.node_count())
            .map(|i| {
                if driven.contains(&i) {
                    annihilating_basis.clone()
                } else {
                    eigen_basis.clone()
                }
            })
            .collect();
        Ok(AlphaSpace { s, node_bases })
    }
}

/// `H C` as an `n x n` outer product.
fn coupling_product(h: &Array1<f64>, c: &Array1<f64>) -> Array2<f64> {
    Array2::from_shape_fn((h.len(), c.len()), |(r, k)| h[r] * c[k])
}

/// Transfer coefficients `g_k = C A^k H` and `r_k = C A^k B` of the shift
/// structure; `gamma(s) = q(s)/s^n` and `eta(s) = r(s)/s^n` with
/// `q(s) = sum_k g_k s^{n-1-k}`.
fn transfer_coefficients(spec: &StructuredNetworkSpec) -> (Vec<f64>, Vec<f64>) {
    let n = spec.state_dim();
    let a = shift_matrix(n);
    let mut g = Vec::with_capacity(n);
    let mut r = Vec::with_capacity(n);
    // Row vector C A^k built incrementally.
    let mut row = spec.c.clone();
    for _ in 0..n {
        g.push(row.dot(&spec.h));
        r.push(row[n - 1]); // C A^k e_n
        row = row.dot(&a);
    }
    (g, r)
}

/// Evaluate `sum_k coeffs[k] s^{n-1-k}`.
fn eval_poly(coeffs: &[f64], s: c64) -> c64 {
    coeffs
        .iter()
        .fold(c64::new(0.0, 0.0), |acc, &g| acc * s + g)
}

/// Roots of the monic polynomial `s^n + c_1 s^{n-1} + ... + c_n` via the
/// companion matrix.
fn monic_roots(tail: &[c64]) -> std::result::Result<Vec<c64>, crate::numerics::NumericsError> {
    let n = tail.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut companion = Array2::<c64>::zeros((n, n));
    for k in 0..n - 1 {
        companion[(k + 1, k)] = c64::new(1.0, 0.0);
    }
    for k in 0..n {
        companion[(k, n - 1)] = -tail[n - 1 - k];
    }
    use ndarray_linalg::Eig;
    let (vals, _) = companion
        .eig()
        .map_err(|e| crate::numerics::NumericsError::Decomposition {
            rows: n,
            cols: n,
            source: e,
        })?;
    Ok(vals.to_vec())
}

/// Outcome of one condition of the exact structured criterion.
struct ConditionOutcome {
    failed_note: Option<String>,
    witness: Option<PbhWitness>,
}

impl ConditionOutcome {
    fn pass() -> Self {
        Self {
            failed_note: None,
            witness: None,
        }
    }
    fn fail(note: String, witness: Option<PbhWitness>) -> Self {
        Self {
            failed_note: Some(note),
            witness,
        }
    }
}

/// Condition (iii): at each spectrum point of the shift matrix, no nonzero
/// product-space element `rho` may satisfy `W^T rho^T = 0`. Decided by a
/// single kernel-rank computation in basis coordinates.
fn alpha_kernel_condition(
    spec: &StructuredNetworkSpec,
    s: c64,
    tol: &ToleranceConfig,
) -> Result<ConditionOutcome> {
    let n = spec.state_dim();
    let n_nodes = spec.node_count();
    let space = spec.alpha_space(s, tol)?;
    let total: usize = space.node_bases.iter().map(|b| b.len()).sum();
    if total == 0 {
        return Ok(ConditionOutcome::pass());
    }
    let mut map = Array2::<c64>::zeros((n_nodes * n, total));
    let mut col = 0usize;
    for (j, basis) in space.node_bases.iter().enumerate() {
        for v in basis {
            for i in 0..n_nodes {
                if i != j && spec.w[(j, i)] != 0.0 {
                    let w = c64::new(spec.w[(j, i)], 0.0);
                    for (r, &x) in v.iter().enumerate() {
                        map[(i * n + r, col)] += w * x;
                    }
                }
            }
            col += 1;
        }
    }
    let rr = rank_of(&map.view(), tol)?;
    if rr.rank == total {
        return Ok(ConditionOutcome::pass());
    }
    // Kernel coefficients assemble a lifted left-null witness.
    let kernel = right_nullspace(&map.view(), tol)?;
    let witness = kernel.into_iter().next().map(|coeffs| {
        let mut alpha = Array1::<c64>::zeros(n_nodes * n);
        let mut col = 0usize;
        for (j, basis) in space.node_bases.iter().enumerate() {
            for v in basis {
                for (r, &x) in v.iter().enumerate() {
                    alpha[j * n + r] += coeffs[col] * x;
                }
                col += 1;
            }
        }
        let norm = alpha.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            alpha.mapv_inplace(|x| x / norm);
        }
        PbhWitness {
            s0: s,
            left_vector: alpha,
            deficiency: total - rr.rank,
        }
    });
    Ok(ConditionOutcome::fail(
        format!("condition (iii) fails at s = {}", fmt_c(s)),
        witness,
    ))
}

/// Condition (iv): away from the shift spectrum, a rank failure of
/// `[I - gamma(s) W, Delta eta(s)]` requires `1/gamma(s)` to be an
/// eigenvalue of `W`, so only roots of `s^n = mu q(s)` for nonzero
/// eigenvalues `mu` of `W` need testing.
fn transfer_rank_condition(
    spec: &StructuredNetworkSpec,
    tol: &ToleranceConfig,
) -> Result<ConditionOutcome> {
    let n = spec.state_dim();
    let n_nodes = spec.node_count();
    let (g, r) = transfer_coefficients(spec);
    if g.iter().all(|&x| x.abs() <= tol.zero_vec_tol) {
        // gamma is identically zero: I - gamma W is always the identity.
        return Ok(ConditionOutcome::pass());
    }
    let w = complex(&spec.w.view());
    let delta_diag: Vec<f64> = spec.delta.iter().map(|&d| f64::from(d)).collect();
    for mu in pbh_test_points(&w.view(), tol)? {
        if mu.norm() <= tol.eig_dedup_radius {
            continue;
        }
        // p(s) = s^n - mu q(s); tail coefficients after the leading 1.
        let tail: Vec<c64> = g.iter().map(|&gk| -mu * gk).collect();
        for s in monic_roots(&tail)? {
            if s.norm() <= tol.eig_dedup_radius {
                continue;
            }
            let sn = s.powi(n as i32);
            let gamma = eval_poly(&g, s) / sn;
            let eta = eval_poly(&r, s) / sn;
            let mut pencil = Array2::<c64>::zeros((n_nodes, 2 * n_nodes));
            for i in 0..n_nodes {
                pencil[(i, i)] = c64::new(1.0, 0.0);
                for j in 0..n_nodes {
                    pencil[(i, j)] -= gamma * w[(i, j)];
                }
                pencil[(i, n_nodes + i)] = delta_diag[i] * eta;
            }
            let rr = rank_of(&pencil.view(), tol)?;
            if rr.rank < n_nodes {
                let witness = build_transfer_witness(spec, s, &pencil, tol)?;
                return Ok(ConditionOutcome::fail(
                    format!(
                        "condition (iv) fails at s = {} (eigenvalue mu = {} of W)",
                        fmt_c(s),
                        fmt_c(mu)
                    ),
                    witness,
                ));
            }
        }
    }
    Ok(ConditionOutcome::pass())
}

/// Lift a condition-(iv) failure into a left-null witness of the full
/// system: `alpha_i = xi_i C (sI - A)^{-1}`.
fn build_transfer_witness(
    spec: &StructuredNetworkSpec,
    s: c64,
    pencil: &Array2<c64>,
    tol: &ToleranceConfig,
) -> Result<Option<PbhWitness>> {
    let n = spec.state_dim();
    let n_nodes = spec.node_count();
    let basis = left_nullspace(&pencil.view(), tol)?;
    let Some(xi) = basis.into_iter().next() else {
        return Ok(None);
    };
    // v = C (sI - A)^{-1} as a row: solve (sI - A)^T x = C^T.
    let a = complex(&shift_matrix(n).view());
    let mut shifted_t = a.t().mapv(|x| -x);
    for i in 0..n {
        shifted_t[(i, i)] += s;
    }
    let c_col = Array1::from_iter(spec.c.iter().map(|&x| c64::new(x, 0.0)));
    let Ok(v) = shifted_t.solve(&c_col) else {
        return Ok(None);
    };
    let mut alpha = Array1::<c64>::zeros(n_nodes * n);
    for i in 0..n_nodes {
        for r in 0..n {
            alpha[i * n + r] = xi[i] * v[r];
        }
    }
    let norm = alpha.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if norm <= tol.zero_vec_tol {
        return Ok(None);
    }
    alpha.mapv_inplace(|x| x / norm);
    Ok(Some(PbhWitness {
        s0: s,
        left_vector: alpha,
        deficiency: 1,
    }))
}

/// Exact criterion for one-dimensional communication networks with `|nu| < N`:
/// controllable iff (i) `(A, H)` controllable, (ii) `(A, C)` observable,
/// (iii) the kernel condition holds on the shift spectrum, and (iv) the
/// transfer rank condition holds off it.
pub fn check_theorem5(
    spec: &StructuredNetworkSpec,
    tol: &ToleranceConfig,
) -> Result<ControllabilityReport> {
    if let Err(invalid) = spec.ensure_valid() {
        return Err(AnalyzerError::from(invalid));
    }
    let n_nodes = spec.node_count();
    if spec.driven().len() >= n_nodes {
        return Ok(ControllabilityReport {
            verdict: Verdict::NotApplicable,
            criterion: Criterion::Theorem5,
            witness: None,
            notes: vec!["every node is driven; the criterion requires |nu| < N".to_string()],
        });
    }
    let n = spec.state_dim();
    let a = complex(&shift_matrix(n).view());
    let h_col = complex(
        &spec
            .h
            .view()
            .insert_axis(ndarray::Axis(1))
            .to_owned()
            .view(),
    );
    let c_row = complex(
        &spec
            .c
            .view()
            .insert_axis(ndarray::Axis(0))
            .to_owned()
            .view(),
    );
    if !pbh_controllable(&a.view(), &h_col.view(), tol)?.0 {
        return Ok(uncontrollable_report(
            Criterion::Theorem5,
            "condition (i) fails: (A, H) is uncontrollable".to_string(),
            None,
        ));
    }
    if !observable(&a.view(), &c_row.view(), tol)? {
        return Ok(uncontrollable_report(
            Criterion::Theorem5,
            "condition (ii) fails: (A, C) is unobservable".to_string(),
            None,
        ));
    }
    for (s, _) in spectrum(&a.view(), tol)? {
        let outcome = alpha_kernel_condition(spec, s, tol)?;
        if let Some(note) = outcome.failed_note {
            return Ok(uncontrollable_report(Criterion::Theorem5, note, outcome.witness));
        }
    }
    let outcome = transfer_rank_condition(spec, tol)?;
    if let Some(note) = outcome.failed_note {
        return Ok(uncontrollable_report(Criterion::Theorem5, note, outcome.witness));
    }
    Ok(ControllabilityReport {
        verdict: Verdict::Controllable,
        criterion: Criterion::Theorem5,
        witness: None,
        notes: vec!["conditions (i)-(iv) all hold".to_string()],
    })
}

fn uncontrollable_report(
    criterion: Criterion,
    note: String,
    witness: Option<PbhWitness>,
) -> ControllabilityReport {
    ControllabilityReport {
        verdict: Verdict::Uncontrollable,
        criterion,
        witness,
        notes: vec![note],
    }
}

/// Structured sufficiency: if `H` has only its last entry nonzero, `C` only
/// its first, and the kernel and transfer conditions hold, the network is
/// controllable. When the coupling shape is wrong the result is inconclusive;
/// when it is right, a condition failure coincides with the exact criterion's
/// necessity and certifies uncontrollability.
pub fn check_corollary3(
    spec: &StructuredNetworkSpec,
    tol: &ToleranceConfig,
) -> Result<ControllabilityReport> {
    if let Err(invalid) = spec.ensure_valid() {
        return Err(AnalyzerError::from(invalid));
    }
    let n_nodes = spec.node_count();
    if spec.driven().len() >= n_nodes {
        return Ok(ControllabilityReport {
            verdict: Verdict::NotApplicable,
            criterion: Criterion::Corollary3,
            witness: None,
            notes: vec!["every node is driven; the result requires |nu| < N".to_string()],
        });
    }
    let n = spec.state_dim();
    let h_in_kappa = spec.h[n - 1].abs() > tol.zero_vec_tol
        && spec.h.iter().take(n - 1).all(|&x| x.abs() <= tol.zero_vec_tol);
    let c_in_tau = spec.c[0].abs() > tol.zero_vec_tol
        && spec.c.iter().skip(1).all(|&x| x.abs() <= tol.zero_vec_tol);
    if !h_in_kappa || !c_in_tau {
        let mut notes = Vec::new();
        if !h_in_kappa {
            notes.push("H is not in kappa (only the last entry may be nonzero)".to_string());
        }
        if !c_in_tau {
            notes.push("C is not in tau (only the first entry may be nonzero)".to_string());
        }
        notes.push("structural condition (i) fails; the sufficiency result is inconclusive".to_string());
        return Ok(ControllabilityReport {
            verdict: Verdict::NotApplicable,
            criterion: Criterion::Corollary3,
            witness: None,
            notes,
        });
    }
    let outcome = alpha_kernel_condition(spec, c64::new(0.0, 0.0), tol)?;
    if let Some(note) = outcome.failed_note {
        return Ok(uncontrollable_report(
            Criterion::Corollary3,
            format!("{note}; with the structured coupling this coincides with the exact criterion"),
            outcome.witness,
        ));
    }
    let outcome = transfer_rank_condition(spec, tol)?;
    if let Some(note) = outcome.failed_note {
        return Ok(uncontrollable_report(
            Criterion::Corollary3,
            format!("{note}; with the structured coupling this coincides with the exact criterion"),
            outcome.witness,
        ));
    }
    Ok(ControllabilityReport {
        verdict: Verdict::Controllable,
        criterion: Criterion::Corollary3,
        witness: None,
        notes: vec!["structured coupling with both spectrum conditions holding".to_string()],
    })
}

/// Exact criterion for diagonalizable `W`: `(W, Delta)` controllable, every
/// `(A + lambda_i H C, B)` controllable, and for every eigenvalue shared by
/// several coupled matrices, the rows `(t_i Delta) (xi^T B)` stay linearly
/// independent.
pub fn check_diagonalizable(
    spec: &StructuredNetworkSpec,
    tol: &ToleranceConfig,
) -> Result<ControllabilityReport> {
    if let Err(invalid) = spec.ensure_valid() {
        return Err(AnalyzerError::from(invalid));
    }
    let n_nodes = spec.node_count();
    let n = spec.state_dim();
    let w = complex(&spec.w.view());
    use ndarray_linalg::Eig;
    let (lambdas, v) = w
        .eig()
        .map_err(|e| crate::numerics::NumericsError::Decomposition {
            rows: n_nodes,
            cols: n_nodes,
            source: e,
        })?;
    // Numerically invertible eigenvector matrix gates diagonalizability.
    let sv = rank_of(&v.view(), tol)?;
    let smin = sv.singular_values.last().copied().unwrap_or(0.0);
    let smax = sv.singular_values.first().copied().unwrap_or(0.0);
    if sv.rank < n_nodes || smin < f64::EPSILON.sqrt() * smax {
        return Ok(ControllabilityReport {
            verdict: Verdict::NotApplicable,
            criterion: Criterion::DiagonalizableW,
            witness: None,
            notes: vec![
                "W is not diagonalizable within tolerance (ill-conditioned eigenvector matrix)"
                    .to_string(),
            ],
        });
    }
    let t = v
        .inv()
        .map_err(|e| crate::numerics::NumericsError::Decomposition {
            rows: n_nodes,
            cols: n_nodes,
            source: e,
        })?;
    // (i) topology pair.
    let delta_mat = complex(&delta_matrix(&spec.delta).view());
    let (topology_ok, witnesses) = pbh_controllable(&w.view(), &delta_mat.view(), tol)?;
    if !topology_ok {
        return Ok(uncontrollable_report(
            Criterion::DiagonalizableW,
            "condition (i) fails: (W, Delta) is uncontrollable".to_string(),
            witnesses.into_iter().next(),
        ));
    }
    // Distinct eigenvalues of W, with the member indices of each cluster.
    let lambda_slice = lambdas.as_slice().unwrap();
    let clusters = cluster_with_members(lambda_slice, tol.eig_dedup_radius);
    let a = complex(&shift_matrix(n).view());
    let b = complex(&unit_input(n).view());
    let hc = complex(&coupling_product(&spec.h, &spec.c).view());
    let coupled: Vec<Array2<c64>> = clusters
        .iter()
        .map(|(lambda, _)| &a + &hc.mapv(|x| x * *lambda))
        .collect();
    // (ii) every coupled pair controllable.
    for (k, (lambda, members)) in clusters.iter().enumerate() {
        let (ok, node_witnesses) = pbh_controllable(&coupled[k].view(), &b.view(), tol)?;
        if !ok {
            let witness = node_witnesses.into_iter().next().and_then(|node_wit| {
                lift_node_witness(&t, members[0], &node_wit, n_nodes, n, tol)
            });
            return Ok(uncontrollable_report(
                Criterion::DiagonalizableW,
                format!(
                    "condition (ii) fails: (A + lambda H C, B) uncontrollable at lambda = {}",
                    fmt_c(*lambda)
                ),
                witness,
            ));
        }
    }
    // (iii) shared eigenvalues across coupled matrices.
    let mut points: Vec<(c64, usize)> = Vec::new(); // (theta, cluster index)
    let mut per_matrix: Vec<Vec<(c64, usize)>> = Vec::new();
    for (k, m) in coupled.iter().enumerate() {
        let evs = spectrum(&m.view(), tol)?;
        for &(theta, _) in &evs {
            points.push((theta, k));
        }
        per_matrix.push(evs);
    }
    let theta_values: Vec<c64> = points.iter().map(|(theta, _)| *theta).collect();
    let groups = group_indices(&theta_values, tol.eig_dedup_radius);
    for group in groups {
        // p counts matrix instances: every W-eigenvalue index of every
        // cluster whose coupled matrix carries this theta.
        let cluster_ids: Vec<usize> = {
            let mut ids: Vec<usize> = group.iter().map(|&g| points[g].1).collect();
            ids.sort_unstable();
            ids.dedup();
            ids
        };
        let instance_count: usize = cluster_ids
            .iter()
            .map(|&k| clusters[k].1.len())
            .sum();
        if instance_count < 2 {
            continue;
        }
        let mut rows: Vec<Array1<c64>> = Vec::new();
        let mut row_meta: Vec<(usize, Array1<c64>)> = Vec::new(); // (W index, xi)
        for &gidx in &group {
            let (theta, k) = points[gidx];
            let eigenvectors = left_eigenspace(&coupled[k].view(), theta, tol)?;
            for xi in eigenvectors {
                let xi_b = xi
                    .iter()
                    .zip(b.column(0).iter())
                    .map(|(x, y)| x * y)
                    .sum::<c64>();
                for &w_index in &clusters[k].1 {
                    let mut row = Array1::<c64>::zeros(n_nodes);
                    for col in 0..n_nodes {
                        row[col] = t[(w_index, col)]
                            * c64::new(f64::from(spec.delta[col]), 0.0)
                            * xi_b;
                    }
                    rows.push(row);
                    row_meta.push((w_index, xi.clone()));
                }
            }
        }
        if rows.len() < 2 {
            continue;
        }
        let mut stacked = Array2::<c64>::zeros((rows.len(), n_nodes));
        for (r, row) in rows.iter().enumerate() {
            stacked.row_mut(r).assign(row);
        }
        let rr = rank_of(&stacked.view(), tol)?;
        if rr.rank < rows.len() {
            let theta = points[group[0]].0;
            let witness =
                dependence_witness(&stacked, &row_meta, &t, theta, n_nodes, n, tol)?;
            return Ok(uncontrollable_report(
                Criterion::DiagonalizableW,
                format!(
                    "condition (iii) fails: dependent driver projections at shared eigenvalue theta = {}",
                    fmt_c(theta)
                ),
                witness,
            ));
        }
    }
    Ok(ControllabilityReport {
        verdict: Verdict::Controllable,
        criterion: Criterion::DiagonalizableW,
        witness: None,
        notes: vec!["conditions (i)-(iii) all hold for the diagonalizable topology".to_string()],
    })
}

/// Cluster complex values, returning each cluster's centroid and member
/// indices.
fn cluster_with_members(values: &[c64], radius: f64) -> Vec<(c64, Vec<usize>)> {
    group_indices(values, radius)
        .into_iter()
        .map(|members| {
            let centroid =
                members.iter().map(|&i| values[i]).sum::<c64>() / members.len() as f64;
            (centroid, members)
        })
        .collect()
}

/// Single-linkage grouping of value indices.
fn group_indices(values: &[c64], radius: f64) -> Vec<Vec<usize>> {
    let mut used = vec![false; values.len()];
    let mut groups = Vec::new();
    for start in 0..values.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let mut members = vec![start];
        let mut frontier = vec![start];
        while let Some(i) = frontier.pop() {
            for j in 0..values.len() {
                if !used[j] && (values[i] - values[j]).norm() <= radius {
                    used[j] = true;
                    members.push(j);
                    frontier.push(j);
                }
            }
        }
        members.sort_unstable();
        groups.push(members);
    }
    groups
}

/// `diag(delta)` as a real matrix.
fn delta_matrix(delta: &[u8]) -> Array2<f64> {
    let mut m = Array2::zeros((delta.len(), delta.len()));
    for (i, &d) in delta.iter().enumerate() {
        m[(i, i)] = f64::from(d);
    }
    m
}

/// Lift a node-level PBH witness `xi` of `(A + lambda HC, B)` at
/// `theta = witness.s0` to the full system: `t_i (x) xi`.
fn lift_node_witness(
    t: &Array2<c64>,
    w_index: usize,
    node_witness: &PbhWitness,
    n_nodes: usize,
    n: usize,
    tol: &ToleranceConfig,
) -> Option<PbhWitness> {
    let mut alpha = Array1::<c64>::zeros(n_nodes * n);
    for i in 0..n_nodes {
        for r in 0..n {
            alpha[i * n + r] = t[(w_index, i)] * node_witness.left_vector[r];
        }
    }
    let norm = alpha.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if norm <= tol.zero_vec_tol {
        return None;
    }
    alpha.mapv_inplace(|x| x / norm);
    Some(PbhWitness {
        s0: node_witness.s0,
        left_vector: alpha,
        deficiency: node_witness.deficiency,
    })
}

/// Combine dependent rows into a lifted witness `sum_k c_k t_{i_k} (x) xi_k`.
fn dependence_witness(
    stacked: &Array2<c64>,
    row_meta: &[(usize, Array1<c64>)],
    t: &Array2<c64>,
    theta: c64,
    n_nodes: usize,
    n: usize,
    tol: &ToleranceConfig,
) -> Result<Option<PbhWitness>> {
    // Coefficients c with sum_k c_k row_k = 0.
    let kernel = left_nullspace(&stacked.view(), tol)?;
    let Some(coeffs) = kernel.into_iter().next() else {
        return Ok(None);
    };
    let mut alpha = Array1::<c64>::zeros(n_nodes * n);
    for (k, (w_index, xi)) in row_meta.iter().enumerate() {
        for i in 0..n_nodes {
            for r in 0..n {
                alpha[i * n + r] += coeffs[k] * t[(*w_index, i)] * xi[r];
            }
        }
    }
    let norm = alpha.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if norm <= tol.zero_vec_tol {
        return Ok(None);
    }
    alpha.mapv_inplace(|x| x / norm);
    Ok(Some(PbhWitness {
        s0: theta,
        left_vector: alpha,
        deficiency: 1,
    }))
}
