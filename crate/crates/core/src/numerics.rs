//! Dense numerical linear-algebra kernels and the classical controllability
//! tests (Kalman rank, PBH) that every analyzer builds on.
//!
//! All kernels operate on complex matrices; real inputs are lifted with
//! [`complex`]. Rank decisions follow the singular-value threshold rule in
//! [`ToleranceConfig`](crate::model::ToleranceConfig).

use ndarray::{concatenate, Array1, Array2, ArrayView2, Axis};
use ndarray_linalg::{c64, Eig, SVD};
use thiserror::Error;

use crate::model::ToleranceConfig;

/// Numerical failure in a LAPACK-backed decomposition.
#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("decomposition failed on {rows}x{cols} matrix: {source}")]
    Decomposition {
        rows: usize,
        cols: usize,
        #[source]
        source: ndarray_linalg::error::LinalgError,
    },
    #[error("empty matrix passed to {op}")]
    EmptyMatrix { op: &'static str },
}

pub type Result<T> = std::result::Result<T, NumericsError>;

/// Outcome of a numerical rank computation.
#[derive(Debug, Clone)]
pub struct RankResult {
    pub rank: usize,
    /// Singular values in descending order.
    pub singular_values: Vec<f64>,
    pub threshold_used: f64,
}

/// Certificate that the pair `(A, B)` fails the PBH test at `s0`:
/// a unit row vector `alpha` with `alpha (s0 I - A) = 0` and `alpha B = 0`.
#[derive(Debug, Clone)]
pub struct PbhWitness {
    pub s0: c64,
    pub left_vector: Array1<c64>,
    /// `n - rank [s0 I - A, B]`.
    pub deficiency: usize,
}

/// Lift a real matrix into the complex kernels.
pub fn complex(m: &ArrayView2<'_, f64>) -> Array2<c64> {
    m.mapv(|x| c64::new(x, 0.0))
}

fn decomposition_err(m: &ArrayView2<'_, c64>, source: ndarray_linalg::error::LinalgError) -> NumericsError {
    NumericsError::Decomposition {
        rows: m.nrows(),
        cols: m.ncols(),
        source,
    }
}

/// Singular values of `m`, descending.
fn singular_values(m: &ArrayView2<'_, c64>) -> Result<Vec<f64>> {
    let (_, sv, _) = m
        .svd(false, false)
        .map_err(|e| decomposition_err(m, e))?;
    Ok(sv.to_vec())
}

/// Numerical rank of `m` under the tolerance rule
/// `sigma > rank_factor * max_dim * sigma_max * machine_eps`.
pub fn rank_of(m: &ArrayView2<'_, c64>, tol: &ToleranceConfig) -> Result<RankResult> {
    if m.is_empty() {
        return Err(NumericsError::EmptyMatrix { op: "rank_of" });
    }
    let sv = singular_values(m)?;
    let threshold = tol.rank_threshold(m.nrows(), m.ncols(), sv.first().copied().unwrap_or(0.0));
    let rank = sv.iter().filter(|&&s| s > threshold).count();
    Ok(RankResult {
        rank,
        singular_values: sv,
        threshold_used: threshold,
    })
}

/// Orthonormal basis of the left null space `{ v : v^T M = 0 }`.
///
/// Basis size is `rows(M) - rank(M)`. Vectors satisfy the residual bound
/// `|v^T M| <= threshold` by construction of the SVD.
pub fn left_nullspace(m: &ArrayView2<'_, c64>, tol: &ToleranceConfig) -> Result<Vec<Array1<c64>>> {
    left_nullspace_floor(m, tol, 0.0)
}

/// Left null space with an absolute floor added to the rank threshold.
///
/// Used when `M = s0 I - A` is formed at a numerically estimated eigenvalue:
/// the smallest singular value then sits at `O(eps * |A|)` rather than exactly
/// zero, and the strict rank rule is too tight to recover the eigenspace.
pub(crate) fn left_nullspace_floor(
    m: &ArrayView2<'_, c64>,
    tol: &ToleranceConfig,
    floor: f64,
) -> Result<Vec<Array1<c64>>> {
    if m.is_empty() {
        return Err(NumericsError::EmptyMatrix { op: "left_nullspace" });
    }
    let (u, sv, _) = m
        .svd(true, false)
        .map_err(|e| decomposition_err(m, e))?;
    let u = u.expect("svd(true, false) returns U");
    let threshold = tol
        .rank_threshold(m.nrows(), m.ncols(), sv.first().copied().unwrap_or(0.0))
        .max(floor);
    let rank = sv.iter().filter(|&&s| s > threshold).count();
    // u^H M = diag(sigma) V^H, so columns of U past the rank conjugate into
    // plain-transpose left null vectors.
    Ok((rank..m.nrows())
        .map(|k| u.column(k).mapv(|x| x.conj()))
        .collect())
}

/// Basis of the right null space `{ x : M x = 0 }`.
pub fn right_nullspace(m: &ArrayView2<'_, c64>, tol: &ToleranceConfig) -> Result<Vec<Array1<c64>>> {
    let mt = m.t();
    left_nullspace(&mt, tol)
}

/// Cluster eigenvalues by single linkage: values within `radius` of each
/// other (transitively) form one spectrum point. Returns `(centroid,
/// algebraic multiplicity)` pairs; the centroid of a defective cluster is
/// typically far more accurate than its members.
pub fn cluster_eigenvalues(values: &[c64], radius: f64) -> Vec<(c64, usize)> {
    let mut used = vec![false; values.len()];
    let mut clusters = Vec::new();
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
        let centroid = members.iter().map(|&i| values[i]).sum::<c64>() / members.len() as f64;
        clusters.push((centroid, members.len()));
    }
    clusters
}

/// Eigenvalues of `m`, clustered per `tol.eig_dedup_radius`.
pub fn spectrum(m: &ArrayView2<'_, c64>, tol: &ToleranceConfig) -> Result<Vec<(c64, usize)>> {
    let (vals, _) = m.eig().map_err(|e| decomposition_err(m, e))?;
    Ok(cluster_eigenvalues(vals.as_slice().unwrap(), tol.eig_dedup_radius))
}

/// Candidate test points for PBH-style rank enumeration over the spectrum
/// of `m`: cluster centroids at the dedup radius and at a ladder of coarser
/// linkage radii.
///
/// A defective eigenvalue with a size-`k` Jordan chain scatters numerically
/// across a disc of radius about `eps^(1/k) * |m|`, far beyond any fixed
/// dedup radius, while the scattered cluster's centroid stays within
/// `O(eps)` of the true value (the trace is exact). Testing at every
/// centroid of every scale recovers those deficiencies. Extra points are
/// sound: for a controllable pair the pencil has full row rank at every
/// complex `s`, so no additional point can produce a false deficiency.
pub fn pbh_test_points(m: &ArrayView2<'_, c64>, tol: &ToleranceConfig) -> Result<Vec<c64>> {
    let (vals, _) = m.eig().map_err(|e| decomposition_err(m, e))?;
    let vals = vals.to_vec();
    let scale = m
        .iter()
        .map(|x| x.norm_sqr())
        .sum::<f64>()
        .sqrt()
        .max(tol.eig_dedup_radius);
    let mut radii = vec![tol.eig_dedup_radius];
    for exp in [-12, -10, -8, -6, -4, -3, -2, -1] {
        radii.push(scale * 10f64.powi(exp));
    }
    radii.sort_by(|a, b| a.partial_cmp(b).expect("finite radii"));
    // Keep every distinct centroid: a coarse centroid lying close to (but
    // not exactly on) a fine-scale point is precisely the accurate test
    // point for a defective cluster, so near-duplicates must not be merged
    // away. Only rounding-level repeats across scales are dropped.
    let exact = scale * f64::EPSILON * 100.0;
    let mut points: Vec<c64> = Vec::new();
    for radius in radii {
        for (centroid, _) in cluster_eigenvalues(&vals, radius) {
            if points.iter().all(|p| (*p - centroid).norm() > exact) {
                points.push(centroid);
            }
        }
    }
    Ok(points)
}

/// Left eigen-decomposition: for each clustered eigenvalue, an orthonormal
/// basis of `{ v : v^T M = lambda v^T }`. Basis size is the geometric
/// multiplicity.
pub fn eigen_left(
    m: &ArrayView2<'_, c64>,
    tol: &ToleranceConfig,
) -> Result<Vec<(c64, Vec<Array1<c64>>)>> {
    let mut out = Vec::new();
    for (lambda, _) in spectrum(m, tol)? {
        let basis = left_eigenspace(m, lambda, tol)?;
        out.push((lambda, basis));
    }
    Ok(out)
}

/// Orthonormal basis of the left eigenspace of `m` at the (numerically
/// estimated) eigenvalue `lambda`.
pub(crate) fn left_eigenspace(
    m: &ArrayView2<'_, c64>,
    lambda: c64,
    tol: &ToleranceConfig,
) -> Result<Vec<Array1<c64>>> {
    let shifted = shift_matrix(m, lambda);
    let scale = singular_values(&shifted.view())?
        .first()
        .copied()
        .unwrap_or(0.0);
    let floor = tol.zero_vec_tol * scale.max(1.0);
    left_nullspace_floor(&shifted.view(), tol, floor)
}

/// `lambda I - m`.
fn shift_matrix(m: &ArrayView2<'_, c64>, lambda: c64) -> Array2<c64> {
    let mut out = m.mapv(|x| -x);
    for i in 0..m.nrows() {
        out[(i, i)] += lambda;
    }
    out
}

/// Kalman rank test: `(A, B)` is controllable iff
/// `[B, AB, ..., A^{n-1} B]` has full row rank `n`.
pub fn kalman_controllable(
    a: &ArrayView2<'_, c64>,
    b: &ArrayView2<'_, c64>,
    tol: &ToleranceConfig,
) -> Result<(bool, RankResult)> {
    let n = a.nrows();
    let q = controllability_matrix(a, b);
    let rr = rank_of(&q.view(), tol)?;
    Ok((rr.rank == n, rr))
}

/// `[B, AB, ..., A^{n-1} B]`.
pub fn controllability_matrix(a: &ArrayView2<'_, c64>, b: &ArrayView2<'_, c64>) -> Array2<c64> {
    let n = a.nrows();
    let mut blocks = Vec::with_capacity(n);
    let mut current = b.to_owned();
    for _ in 0..n {
        blocks.push(current.clone());
        current = a.dot(&current);
    }
    let views: Vec<_> = blocks.iter().map(|m| m.view()).collect();
    concatenate(Axis(1), &views).expect("blocks share row count")
}

/// PBH test: `(A, B)` is controllable iff `rank [s0 I - A, B] = n` for every
/// eigenvalue `s0` of `A`. Returns one witness per deficient spectrum point.
pub fn pbh_controllable(
    a: &ArrayView2<'_, c64>,
    b: &ArrayView2<'_, c64>,
    tol: &ToleranceConfig,
) -> Result<(bool, Vec<PbhWitness>)> {
    let n = a.nrows();
    let mut witnesses: Vec<PbhWitness> = Vec::new();
    for s0 in pbh_test_points(a, tol)? {
        // Nearby test points certify the same spectrum point once.
        if witnesses
            .iter()
            .any(|w| (w.s0 - s0).norm() <= tol.eig_dedup_radius)
        {
            continue;
        }
        let pencil = pbh_pencil(a, b, s0);
        let rr = rank_of(&pencil.view(), tol)?;
        if rr.rank < n {
            let basis = left_nullspace(&pencil.view(), tol)?;
            let left_vector = basis
                .into_iter()
                .next()
                .expect("rank deficiency implies nonempty left null space");
            witnesses.push(PbhWitness {
                s0,
                left_vector,
                deficiency: n - rr.rank,
            });
        }
    }
    Ok((witnesses.is_empty(), witnesses))
}

/// `[s0 I - A, B]`.
pub fn pbh_pencil(a: &ArrayView2<'_, c64>, b: &ArrayView2<'_, c64>, s0: c64) -> Array2<c64> {
    let shifted = shift_matrix(a, s0);
    concatenate(Axis(1), &[shifted.view(), b.view()]).expect("row counts match")
}

/// Observability of `(A, C)` via duality: `(A^T, C^T)` controllability.
pub fn observable(
    a: &ArrayView2<'_, c64>,
    c: &ArrayView2<'_, c64>,
    tol: &ToleranceConfig,
) -> Result<bool> {
    let at = a.t();
    let ct = c.t();
    Ok(pbh_controllable(&at, &ct, tol)?.0)
}

/// Similarity test via Jordan structure: equal eigenvalue multisets (within
/// the dedup radius) and, for each shared eigenvalue, equal rank sequences
/// `rank((A - lambda I)^k)`, `k = 1..n`.
///
/// Power ranks are thresholded against `sigma_max(A - lambda I)^k` rather
/// than the power's own largest singular value, so that exact nilpotency is
/// not masked by rounding noise.
pub fn similar(a1: &ArrayView2<'_, c64>, a2: &ArrayView2<'_, c64>, tol: &ToleranceConfig) -> Result<bool> {
    if a1.nrows() != a2.nrows() || a1.ncols() != a2.ncols() {
        return Ok(false);
    }
    let n = a1.nrows();
    if n == 0 {
        return Ok(true);
    }
    let (v1, _) = a1.eig().map_err(|e| decomposition_err(a1, e))?;
    let (v2, _) = a2.eig().map_err(|e| decomposition_err(a2, e))?;
    let mut all: Vec<c64> = v1.to_vec();
    all.extend(v2.iter().copied());
    for (lambda, _) in cluster_eigenvalues(&all, tol.eig_dedup_radius) {
        let m1 = multiplicity_near(&v1.to_vec(), lambda, tol.eig_dedup_radius, &all);
        let m2 = multiplicity_near(&v2.to_vec(), lambda, tol.eig_dedup_radius, &all);
        if m1 != m2 {
            return Ok(false);
        }
        if m1 == 0 {
            continue;
        }
        if !equal_power_ranks(a1, a2, lambda, n, tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Count of eigenvalues in `vals` closer to `lambda` than to any other
/// cluster centroid, within the dedup radius scaled by cluster extent.
fn multiplicity_near(vals: &[c64], lambda: c64, radius: f64, all: &[c64]) -> usize {
    // A cluster formed by single linkage over the union can span more than
    // one radius; count members by nearest-centroid assignment instead.
    let centroids: Vec<c64> = cluster_eigenvalues(all, radius)
        .into_iter()
        .map(|(c, _)| c)
        .collect();
    vals.iter()
        .filter(|&&v| {
            let nearest = centroids
                .iter()
                .min_by(|a, b| {
                    (v - **a)
                        .norm()
                        .partial_cmp(&(v - **b).norm())
                        .expect("finite norms")
                })
                .expect("at least one centroid");
            (*nearest - lambda).norm() <= radius
        })
        .count()
}

fn equal_power_ranks(
    a1: &ArrayView2<'_, c64>,
    a2: &ArrayView2<'_, c64>,
    lambda: c64,
    n: usize,
    tol: &ToleranceConfig,
) -> Result<bool> {
    let s1 = shift_matrix(a1, lambda);
    let s2 = shift_matrix(a2, lambda);
    let scale1 = singular_values(&s1.view())?.first().copied().unwrap_or(0.0);
    let scale2 = singular_values(&s2.view())?.first().copied().unwrap_or(0.0);
    let mut p1 = Array2::<c64>::eye(n);
    let mut p2 = Array2::<c64>::eye(n);
    for k in 1..=n {
        p1 = p1.dot(&s1);
        p2 = p2.dot(&s2);
        let r1 = rank_with_scale(&p1.view(), scale1.powi(k as i32), tol)?;
        let r2 = rank_with_scale(&p2.view(), scale2.powi(k as i32), tol)?;
        if r1 != r2 {
            return Ok(false);
        }
        if r1 == 0 && r2 == 0 {
            break;
        }
    }
    Ok(true)
}

/// Rank with the threshold anchored to an external scale instead of the
/// matrix's own largest singular value.
fn rank_with_scale(m: &ArrayView2<'_, c64>, scale: f64, tol: &ToleranceConfig) -> Result<usize> {
    let sv = singular_values(m)?;
    let own = sv.first().copied().unwrap_or(0.0);
    let threshold = tol.rank_threshold(m.nrows(), m.ncols(), own.max(scale));
    Ok(sv.iter().filter(|&&s| s > threshold).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn re(m: Array2<f64>) -> Array2<c64> {
        complex(&m.view())
    }

    #[test]
    fn rank_of_identity() {
        let rr = rank_of(&Array2::<c64>::eye(4).view(), &tol()).unwrap();
        assert_eq!(rr.rank, 4);
        assert_eq!(rr.singular_values.len(), 4);
    }

    #[test]
    fn rank_of_outer_product_is_one() {
        let u = array![1.0, -2.0, 3.0];
        let v = array![4.0, 5.0];
        let m = Array2::from_shape_fn((3, 2), |(i, j)| c64::new(u[i] * v[j], 0.0));
        assert_eq!(rank_of(&m.view(), &tol()).unwrap().rank, 1);
    }

    #[test]
    fn rank_counts_values_above_threshold() {
        let rr = rank_of(&re(array![[1.0, 0.0], [0.0, 0.0]]).view(), &tol()).unwrap();
        assert_eq!(rr.rank, 1);
        assert!(rr.singular_values[0] > rr.threshold_used);
        assert!(rr.singular_values[1] <= rr.threshold_used);
    }

    #[test]
    fn eigen_left_diagonal() {
        let m = re(array![[1.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 3.0]]);
        let mut pairs = eigen_left(&m.view(), &tol()).unwrap();
        pairs.sort_by(|a, b| a.0.re.partial_cmp(&b.0.re).unwrap());
        let values: Vec<f64> = pairs.iter().map(|(l, _)| l.re).collect();
        assert_abs_diff_eq!(values[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(values[1], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(values[2], 3.0, epsilon = 1e-12);
        for (k, (_, basis)) in pairs.iter().enumerate() {
            assert_eq!(basis.len(), 1);
            // Standard basis row, up to phase.
            assert_abs_diff_eq!(basis[0][k].norm(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn eigen_left_shift_matrix_single_zero_eigenvalue() {
        let shift = re(array![
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, 0.0]
        ]);
        let pairs = eigen_left(&shift.view(), &tol()).unwrap();
        assert_eq!(pairs.len(), 1);
        let (lambda, basis) = &pairs[0];
        assert!(lambda.norm() < 1e-10);
        assert_eq!(basis.len(), 1, "geometric multiplicity of the shift matrix is 1");
    }

    #[test]
    fn eigen_left_residuals() {
        let m = re(array![
            [0.3, -1.2, 0.7, 0.1],
            [2.0, 0.4, -0.5, 0.9],
            [-0.8, 1.1, 0.2, -0.3],
            [0.6, -0.7, 1.5, -1.0]
        ]);
        for (lambda, basis) in eigen_left(&m.view(), &tol()).unwrap() {
            for v in basis {
                let residual = v.dot(&m) - v.mapv(|x| x * lambda);
                let norm = residual.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
                assert!(norm < 1e-8, "residual {norm} at lambda {lambda}");
            }
        }
    }

    #[test]
    fn kalman_identity_single_input_uncontrollable() {
        let a = re(Array2::eye(2));
        let b = re(array![[1.0], [0.0]]);
        let (ok, rr) = kalman_controllable(&a.view(), &b.view(), &tol()).unwrap();
        assert!(!ok);
        assert_eq!(rr.rank, 1);
    }

    #[test]
    fn pbh_scalar_integrator_controllable() {
        let a = re(array![[0.0]]);
        let b = re(array![[1.0]]);
        let (ok, witnesses) = pbh_controllable(&a.view(), &b.view(), &tol()).unwrap();
        assert!(ok);
        assert!(witnesses.is_empty());
    }

    #[test]
    fn pbh_witness_invariants() {
        // (I_2, e_1): deficient at s = 1 with left vector e_2.
        let a = re(Array2::eye(2));
        let b = re(array![[1.0], [0.0]]);
        let (ok, witnesses) = pbh_controllable(&a.view(), &b.view(), &tol()).unwrap();
        assert!(!ok);
        assert_eq!(witnesses.len(), 1);
        let w = &witnesses[0];
        assert_abs_diff_eq!((w.s0 - c64::new(1.0, 0.0)).norm(), 0.0, epsilon = 1e-10);
        let norm: f64 = w.left_vector.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
        let pencil = pbh_pencil(&a.view(), &b.view(), w.s0);
        let residual = w.left_vector.dot(&pencil);
        let rnorm = residual.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        assert!(rnorm < tol().zero_vec_tol);
        assert_eq!(w.deficiency, 1);
    }

    #[test]
    fn observable_shift_with_first_output() {
        let a = re(array![[0.0, 1.0], [0.0, 0.0]]);
        let c = re(array![[1.0, 0.0]]);
        assert!(observable(&a.view(), &c.view(), &tol()).unwrap());
    }

    #[test]
    fn unobservable_decoupled_mode() {
        let a = re(array![[1.0, 0.0], [0.0, 2.0]]);
        let c = re(array![[1.0, 0.0]]);
        assert!(!observable(&a.view(), &c.view(), &tol()).unwrap());
    }

    #[test]
    fn similar_by_construction() {
        let a = re(array![[1.0, 2.0], [3.0, -1.0]]);
        // P A P^-1 with P = [[2, 1], [1, 1]], P^-1 = [[1, -1], [-1, 2]].
        let p = re(array![[2.0, 1.0], [1.0, 1.0]]);
        let p_inv = re(array![[1.0, -1.0], [-1.0, 2.0]]);
        let transformed = p.dot(&a).dot(&p_inv);
        assert!(similar(&a.view(), &transformed.view(), &tol()).unwrap());
    }

    #[test]
    fn similar_distinguishes_jordan_structure() {
        let diagonal = re(Array2::eye(2));
        let jordan = re(array![[1.0, 1.0], [0.0, 1.0]]);
        assert!(!similar(&diagonal.view(), &jordan.view(), &tol()).unwrap());
    }

    #[test]
    fn similar_nilpotent_shift_vs_zero() {
        let shift = re(array![[0.0, 1.0], [0.0, 0.0]]);
        let zero = re(Array2::zeros((2, 2)));
        // rank sequences (1, 0) vs (0, 0).
        assert!(!similar(&shift.view(), &zero.view(), &tol()).unwrap());
    }

    #[test]
    fn similar_is_reflexive_and_symmetric() {
        let a = re(array![[0.0, 1.0], [-2.0, 3.0]]);
        let b = re(array![[1.0, 0.0], [0.5, 2.0]]);
        assert!(similar(&a.view(), &a.view(), &tol()).unwrap());
        assert_eq!(
            similar(&a.view(), &b.view(), &tol()).unwrap(),
            similar(&b.view(), &a.view(), &tol()).unwrap()
        );
    }

    #[test]
    fn left_nullspace_full_row_rank_is_empty() {
        let m = re(array![[1.0, 0.0, 2.0], [0.0, 1.0, -1.0]]);
        assert!(left_nullspace(&m.view(), &tol()).unwrap().is_empty());
    }

    #[test]
    fn left_nullspace_duplicated_rows() {
        let m = re(array![[1.0, 2.0, 3.0], [1.0, 2.0, 3.0]]);
        let basis = left_nullspace(&m.view(), &tol()).unwrap();
        assert_eq!(basis.len(), 1);
        let v = &basis[0];
        // Direction (e_1 - e_2)/sqrt(2), up to phase.
        assert_abs_diff_eq!((v[0] + v[1]).norm(), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(v[0].norm(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-10);
        let residual = v.dot(&m);
        assert!(residual.iter().map(|x| x.norm()).fold(0.0, f64::max) < 1e-10);
    }

    #[test]
    fn cluster_merges_nearby_values() {
        let vals = [
            c64::new(1.0, 0.0),
            c64::new(1.0 + 4e-9, 0.0),
            c64::new(2.0, 0.0),
        ];
        let clusters = cluster_eigenvalues(&vals, 1e-8);
        assert_eq!(clusters.len(), 2);
        let sizes: Vec<usize> = {
            let mut s: Vec<usize> = clusters.iter().map(|(_, m)| *m).collect();
            s.sort_unstable();
            s
        };
        assert_eq!(sizes, vec![1, 2]);
    }
}
