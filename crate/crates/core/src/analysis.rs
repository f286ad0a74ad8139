//! Structural analysis of a pair `(A, C)`: Schur stability, eigenvalue
//! observability (PBH), detectability, and the observability staircase
//! (Kalman) decomposition.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{complex_numerical_rank, eigenvalues, numerical_rank, svd, RealMatrix, Spectrum};
use crate::tolerances::Tolerances;

/// Plant `x(k+1) = A x(k) + B u(k)`, `y(k) = C x(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemRealization {
    a: RealMatrix,
    b: RealMatrix,
    c: RealMatrix,
    name: Option<String>,
}

impl SystemRealization {
    /// Validates dimensions and requires `rank C = p` at `tol_rank`.
    pub fn new(a: RealMatrix, b: RealMatrix, c: RealMatrix, tol_rank: f64) -> Result<Self> {
        let n = a.rows();
        if n == 0 || !a.is_square() {
            return Err(Error::dim("A", "nonempty square matrix", format!("{}x{}", a.rows(), a.cols())));
        }
        if b.rows() != n || b.cols() == 0 {
            return Err(Error::dim("B", format!("{n}xm with m >= 1"), format!("{}x{}", b.rows(), b.cols())));
        }
        if c.cols() != n || c.rows() == 0 {
            return Err(Error::dim("C", format!("px{n} with p >= 1"), format!("{}x{}", c.rows(), c.cols())));
        }
        for (name, m) in [("A", &a), ("B", &b), ("C", &c)] {
            if !m.is_finite() {
                return Err(Error::NonFinite(name.into()));
            }
        }
        let p = c.rows();
        let rank = numerical_rank(&c, tol_rank);
        if rank < p {
            return Err(Error::RankDeficient {
                context: "C (rank[C] = p is required)".into(),
                rank,
                expected: p,
            });
        }
        Ok(SystemRealization { a, b, c, name: None })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn a(&self) -> &RealMatrix {
        &self.a
    }

    pub fn b(&self) -> &RealMatrix {
        &self.b
    }

    pub fn c(&self) -> &RealMatrix {
        &self.c
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn m(&self) -> usize {
        self.b.cols()
    }

    pub fn p(&self) -> usize {
        self.c.rows()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchurVerdict {
    pub stable: bool,
    pub radius: f64,
    /// Eigenvalue of largest magnitude; `None` for an empty matrix.
    pub worst: Option<Complex64>,
}

/// Stable iff the spectral radius is below `1 − margin`.
pub fn is_schur_stable(m: &RealMatrix, margin: f64) -> Result<SchurVerdict> {
    let spectrum = eigenvalues(m)?;
    let radius = spectrum.radius();
    Ok(SchurVerdict {
        stable: radius < 1.0 - margin,
        radius,
        worst: spectrum.dominant(),
    })
}

fn check_pair(a: &RealMatrix, c: &RealMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::dim("A", "square matrix", format!("{}x{}", a.rows(), a.cols())));
    }
    if c.cols() != a.rows() {
        return Err(Error::dim("C", format!("{} columns", a.rows()), c.cols()));
    }
    if c.max_abs() == 0.0 {
        return Err(Error::InvalidConfig("C must be nonzero".into()));
    }
    Ok(())
}

/// Numerical rank of the complex `(n+p) × n` matrix `[C; z·I − A]`.
pub fn pbh_rank_at(a: &RealMatrix, c: &RealMatrix, z: Complex64, tol_rank: f64) -> Result<usize> {
    if !a.is_square() || c.cols() != a.rows() {
        return Err(Error::dim(
            "PBH stack",
            format!("A n×n and C p×n, n = {}", a.rows()),
            format!("A {}x{}, C {}x{}", a.rows(), a.cols(), c.rows(), c.cols()),
        ));
    }
    let (n, p) = (a.rows(), c.rows());
    let mut entries = Vec::with_capacity((n + p) * n);
    for i in 0..p {
        entries.extend((0..n).map(|j| Complex64::new(c[(i, j)], 0.0)));
    }
    for i in 0..n {
        entries.extend((0..n).map(|j| {
            let d = if i == j { z } else { Complex64::new(0.0, 0.0) };
            d - a[(i, j)]
        }));
    }
    Ok(complex_numerical_rank(n + p, n, &entries, tol_rank))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigClassification {
    /// Cluster-averaged eigenvalue (repeated eigenvalues share one entry
    /// value and one verdict).
    pub eigenvalue: Complex64,
    pub magnitude: f64,
    pub stable: bool,
    pub observable: bool,
    pub pbh_rank: usize,
}

type Cluster = (Complex64, Vec<usize>);

/// Groups of eigenvalue clusters that may be one defective eigenvalue.
///
/// Rounding splits an eigenvalue with a Jordan block of size `k` into `k`
/// values about `(ε·‖A‖)^{1/k}` apart, far beyond the cluster tolerance,
/// while their mean stays accurate. For `k` from `n` down to 2, clusters
/// linked within ten times that spread are merged when they hold at least
/// `k` eigenvalues between them.
fn defective_groups(clusters: Vec<Cluster>, scale: f64) -> Vec<(Complex64, Vec<Cluster>)> {
    let total: usize = clusters.iter().map(|c| c.1.len()).sum();
    let mut groups: Vec<(Complex64, Vec<Cluster>)> = clusters.into_iter().map(|c| (c.0, vec![c])).collect();
    let size = |g: &(Complex64, Vec<Cluster>)| g.1.iter().map(|c| c.1.len()).sum::<usize>();
    for k in (2..=total).rev() {
        let radius = 10.0 * (f64::EPSILON * scale).powf(1.0 / k as f64);
        // Single-linkage components of the group means at this radius.
        let g = groups.len();
        let mut label: Vec<usize> = (0..g).collect();
        let mut changed = true;
        while changed {
            changed = false;
            for i in 0..g {
                for j in 0..g {
                    if label[j] < label[i] && (groups[i].0 - groups[j].0).norm() <= radius {
                        label[i] = label[j];
                        changed = true;
                    }
                }
            }
        }
        let mut next: Vec<(Complex64, Vec<Cluster>)> = Vec::new();
        for root in 0..g {
            let members: Vec<usize> = (0..g).filter(|&i| label[i] == root).collect();
            if members.is_empty() {
                continue;
            }
            let count: usize = members.iter().map(|&i| size(&groups[i])).sum();
            if members.len() > 1 && count >= k {
                let mean = members.iter().map(|&i| groups[i].0 * size(&groups[i]) as f64).sum::<Complex64>() / count as f64;
                let parts = members.iter().flat_map(|&i| groups[i].1.clone()).collect();
                next.push((mean, parts));
            } else {
                next.extend(members.iter().map(|&i| groups[i].clone()));
            }
        }
        groups = next;
    }
    groups
}

/// One entry per eigenvalue, with multiplicity. PBH is evaluated once per
/// cluster of nearly equal eigenvalues, at the cluster mean. Clusters that
/// look like the rounding spread of one defective eigenvalue are reported
/// at their common mean, and are unobservable if PBH fails there.
pub fn classify_eigenvalues(a: &RealMatrix, c: &RealMatrix, tol: &Tolerances) -> Result<Vec<EigClassification>> {
    check_pair(a, c)?;
    let n = a.rows();
    let spectrum = eigenvalues(a)?;
    let mut out: Vec<Option<EigClassification>> = vec![None; spectrum.len()];
    for (group_mean, clusters) in defective_groups(spectrum.clusters(tol.cluster), a.norm_fro().max(1.0)) {
        let group_rank = if clusters.len() > 1 { pbh_rank_at(a, c, group_mean, tol.rank)? } else { n };
        for (mean, members) in clusters.iter() {
            let rank = pbh_rank_at(a, c, *mean, tol.rank)?.min(group_rank);
            let value = if clusters.len() > 1 { group_mean } else { *mean };
            let magnitude = value.norm();
            let entry = EigClassification {
                eigenvalue: value,
                magnitude,
                stable: magnitude < 1.0 - tol.boundary,
                observable: rank == n,
                pbh_rank: rank,
            };
            for &i in members {
                out[i] = Some(entry.clone());
            }
        }
    }
    let mut out: Vec<EigClassification> = out.into_iter().map(|e| e.expect("every eigenvalue clustered")).collect();
    out.sort_by(|x, y| {
        x.eigenvalue
            .re
            .total_cmp(&y.eigenvalue.re)
            .then(x.eigenvalue.im.total_cmp(&y.eigenvalue.im))
    });
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectabilityVerdict {
    pub detectable: bool,
    /// Distinct unstable unobservable eigenvalues; empty iff detectable.
    pub witness: Vec<Complex64>,
}

/// Detectable iff every eigenvalue with `|λ| ≥ 1` passes the PBH test.
pub fn is_detectable(a: &RealMatrix, c: &RealMatrix, tol: &Tolerances) -> Result<DetectabilityVerdict> {
    let classes = classify_eigenvalues(a, c, tol)?;
    let mut witness: Vec<Complex64> = Vec::new();
    for e in classes.iter().filter(|e| !e.stable && !e.observable) {
        if !witness.contains(&e.eigenvalue) {
            witness.push(e.eigenvalue);
        }
    }
    Ok(DetectabilityVerdict {
        detectable: witness.is_empty(),
        witness,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservabilityVerdict {
    /// PBH verdict over all of σ(A).
    pub observable: bool,
    /// Rank of `[C; CA; …; CA^{n−1}]` at the same tolerance.
    pub stack_rank: usize,
    /// Whether the two routes agree.
    pub consistent: bool,
}

pub fn is_observable(a: &RealMatrix, c: &RealMatrix, tol: &Tolerances) -> Result<ObservabilityVerdict> {
    let classes = classify_eigenvalues(a, c, tol)?;
    let observable = classes.iter().all(|e| e.observable);
    let stack_rank = numerical_rank(&observability_matrix(a, c)?, tol.rank);
    Ok(ObservabilityVerdict {
        observable,
        stack_rank,
        consistent: observable == (stack_rank == a.rows()),
    })
}

/// `[C; CA; …; CA^{n−1}]`.
pub fn observability_matrix(a: &RealMatrix, c: &RealMatrix) -> Result<RealMatrix> {
    let n = a.rows();
    let mut out = c.clone();
    let mut block = c.clone();
    for _ in 1..n {
        block = block.matmul(a)?;
        out = RealMatrix::vstack(&out, &block)?;
    }
    Ok(out)
}

/// Orthogonal observability decomposition:
/// `T_kᵀ·A·T_k = [[A11, 0], [A21, A22]]`, `C·T_k = [C1, 0]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KalmanDecomposition {
    pub t_k: RealMatrix,
    pub a11: RealMatrix,
    pub a21: RealMatrix,
    pub a22: RealMatrix,
    pub c1: RealMatrix,
    /// Dimension of the observable block.
    pub q: usize,
    /// Largest entry of the discarded blocks (`A12` and `C2`).
    pub off_block_residual: f64,
}

impl KalmanDecomposition {
    pub fn is_observable(&self) -> bool {
        self.a22.rows() == 0
    }

    /// `T_k·[[A11, 0], [A21, A22]]·T_kᵀ`.
    pub fn reconstruct(&self) -> RealMatrix {
        let n = self.t_k.rows();
        let q = self.q;
        let mut blk = RealMatrix::zeros(n, n);
        blk.set_block(0, 0, &self.a11);
        blk.set_block(q, 0, &self.a21);
        blk.set_block(q, q, &self.a22);
        &(&self.t_k * &blk) * &self.t_k.transpose()
    }

    pub fn unobservable_eigenvalues(&self) -> Result<Spectrum> {
        eigenvalues(&self.a22)
    }
}

/// Observability staircase. Each stage splits the remaining coordinates
/// into directions seen by the current output map (kept) and its null space
/// (recursed into, with the coupling block of `A` as the next output map).
/// What is left when the output map vanishes is the unobservable subspace.
pub fn kalman_decompose(a: &RealMatrix, c: &RealMatrix, tol: &Tolerances) -> Result<KalmanDecomposition> {
    check_pair(a, c)?;
    let n = a.rows();
    let a_scale = a.norm_fro();

    let mut observed: Vec<Vec<f64>> = Vec::new();
    let mut basis = RealMatrix::identity(n);
    let mut a_cur = a.clone();
    let mut out_map = c.clone();
    let mut first = true;
    while basis.cols() > 0 {
        let k = basis.cols();
        let d = svd(&out_map);
        let smax = d.singular_values.first().copied().unwrap_or(0.0);
        let threshold = if first { tol.rank * smax } else { tol.rank * a_scale.max(smax) };
        let rho = d.singular_values.iter().filter(|&&s| s > threshold && s > 0.0).count();
        if rho == 0 {
            break;
        }
        let seen = d.v.block(0, 0, k, rho);
        let rest = d.v.block(0, rho, k, k - rho);
        let seen_global = &basis * &seen;
        observed.extend((0..rho).map(|j| seen_global.col_vec(j)));
        out_map = &(&seen.transpose() * &a_cur) * &rest;
        a_cur = &(&rest.transpose() * &a_cur) * &rest;
        basis = &basis * &rest;
        first = false;
    }

    let q = observed.len();
    if q == n {
        return Ok(KalmanDecomposition {
            t_k: RealMatrix::identity(n),
            a11: a.clone(),
            a21: RealMatrix::zeros(0, n),
            a22: RealMatrix::zeros(0, 0),
            c1: c.clone(),
            q,
            off_block_residual: 0.0,
        });
    }

    let mut t_k = RealMatrix::zeros(n, n);
    for (j, col) in observed.iter().enumerate() {
        for i in 0..n {
            t_k[(i, j)] = col[i];
        }
    }
    t_k.set_block(0, q, &basis);

    let blk = &(&t_k.transpose() * a) * &t_k;
    let ct = c * &t_k;
    let off = blk.block(0, q, q, n - q).max_abs().max(ct.block(0, q, c.rows(), n - q).max_abs());
    Ok(KalmanDecomposition {
        a11: blk.block(0, 0, q, q),
        a21: blk.block(q, 0, n - q, q),
        a22: blk.block(q, q, n - q, n - q),
        c1: ct.block(0, 0, c.rows(), q),
        t_k,
        q,
        off_block_residual: off,
    })
}

/// Everything the `analyze` command reports about a system.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub eigenvalues: Vec<EigClassification>,
    pub spectral_radius: f64,
    pub schur_stable: bool,
    pub detectable: bool,
    pub witness: Vec<Complex64>,
    pub observable: bool,
    pub observability_stack_rank: usize,
    /// Present only when the pair is unobservable.
    pub kalman: Option<KalmanSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct KalmanSummary {
    pub q: usize,
    pub unobservable_eigenvalues: Vec<Complex64>,
    pub unobservable_block_stable: bool,
    pub reconstruction_residual: f64,
    pub decomposition: KalmanDecomposition,
}

pub fn analyze(system: &SystemRealization, tol: &Tolerances) -> Result<AnalysisReport> {
    let (a, c) = (system.a(), system.c());
    let classes = classify_eigenvalues(a, c, tol)?;
    let det = is_detectable(a, c, tol)?;
    let obs = is_observable(a, c, tol)?;
    let schur = is_schur_stable(a, tol.boundary)?;
    let kalman = if obs.observable {
        None
    } else {
        let kd = kalman_decompose(a, c, tol)?;
        let unobs = kd.unobservable_eigenvalues()?;
        let recon = kd.reconstruct().max_abs_diff(a).unwrap_or(f64::INFINITY);
        Some(KalmanSummary {
            q: kd.q,
            unobservable_block_stable: unobs.radius() < 1.0 - tol.boundary,
            unobservable_eigenvalues: unobs.sorted(),
            reconstruction_residual: recon,
            decomposition: kd,
        })
    };
    Ok(AnalysisReport {
        n: system.n(),
        m: system.m(),
        p: system.p(),
        eigenvalues: classes,
        spectral_radius: schur.radius,
        schur_stable: schur.stable,
        detectable: det.detectable,
        witness: det.witness,
        observable: obs.observable,
        observability_stack_rank: obs.stack_rank,
        kalman,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> RealMatrix {
        RealMatrix::from_rows(rows).unwrap()
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn schur_examples() {
        let v = is_schur_stable(&RealMatrix::scalar(3, 0.5), 0.0).unwrap();
        assert!(v.stable);
        assert!((v.radius - 0.5).abs() < 1e-15);

        let v = is_schur_stable(&RealMatrix::identity(2), 0.0).unwrap();
        assert!(!v.stable);
        assert!((v.worst.unwrap() - re(1.0)).norm() < 1e-15);

        let v = is_schur_stable(&m(&[&[0.0, 1.0], &[-0.25, 0.0]]), 0.0).unwrap();
        assert!(v.stable);
        assert!((v.radius - 0.5).abs() < 1e-14);
    }

    #[test]
    fn pbh_examples() {
        let a = RealMatrix::diag(&[0.5, 2.0]);
        assert_eq!(pbh_rank_at(&a, &m(&[&[0.0, 1.0]]), re(2.0), 1e-9).unwrap(), 2);
        assert_eq!(pbh_rank_at(&a, &m(&[&[1.0, 0.0]]), re(2.0), 1e-9).unwrap(), 1);
        assert_eq!(pbh_rank_at(&m(&[&[0.0]]), &m(&[&[1.0]]), re(1.0), 1e-9).unwrap(), 1);
        assert!(pbh_rank_at(&a, &m(&[&[1.0, 0.0, 0.0]]), re(1.0), 1e-9).is_err());
    }

    #[test]
    fn classification_examples() {
        let a = RealMatrix::diag(&[0.5, 2.0]);
        let cl = classify_eigenvalues(&a, &m(&[&[0.0, 1.0]]), &tol()).unwrap();
        assert_eq!(cl.len(), 2);
        assert!(cl[0].stable && !cl[0].observable);
        assert!(!cl[1].stable && cl[1].observable);

        let cl = classify_eigenvalues(&a, &m(&[&[1.0, 0.0]]), &tol()).unwrap();
        assert!(cl[0].stable && cl[0].observable);
        assert!(!cl[1].stable && !cl[1].observable);

        let cl = classify_eigenvalues(&RealMatrix::scalar(2, 0.3), &m(&[&[1.0, 0.0]]), &tol()).unwrap();
        assert!(cl.iter().all(|e| e.stable));
    }

    #[test]
    fn repeated_eigenvalue_shares_verdict() {
        // Jordan block at 1 observed through the second state only is
        // unobservable; both copies must carry the same verdict.
        let a = m(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let cl = classify_eigenvalues(&a, &m(&[&[1.0, 0.0]]), &tol()).unwrap();
        assert_eq!(cl[0], cl[1]);
        assert!(cl[0].observable);
        let cl = classify_eigenvalues(&a, &m(&[&[0.0, 1.0]]), &tol()).unwrap();
        assert_eq!(cl[0], cl[1]);
        assert!(!cl[0].observable && !cl[0].stable);
    }

    #[test]
    fn detectability_examples() {
        let a = RealMatrix::diag(&[0.5, 2.0]);
        assert!(is_detectable(&a, &m(&[&[0.0, 1.0]]), &tol()).unwrap().detectable);
        let v = is_detectable(&a, &m(&[&[1.0, 0.0]]), &tol()).unwrap();
        assert!(!v.detectable);
        assert_eq!(v.witness.len(), 1);
        assert!((v.witness[0] - re(2.0)).norm() < 1e-12);
        assert!(is_detectable(&RealMatrix::scalar(2, 0.3), &m(&[&[1.0, 0.0]]), &tol()).unwrap().detectable);
    }

    #[test]
    fn boundary_eigenvalue_is_unstable() {
        let a = RealMatrix::diag(&[1.0 - 1e-12, 0.2]);
        let v = is_detectable(&a, &m(&[&[0.0, 1.0]]), &tol()).unwrap();
        assert!(!v.detectable);
    }

    #[test]
    fn zero_c_rejected() {
        assert!(is_detectable(&RealMatrix::identity(2), &RealMatrix::zeros(1, 2), &tol()).is_err());
    }

    #[test]
    fn defective_eigenvalue_is_judged_at_its_mean() {
        // Triple eigenvalue 1 with a single Jordan block; rounding splits it
        // by about 1e-5, and the pair is unobservable at 1.
        let a = m(&[&[0.0, 1.0, 1.0], &[-1.0, 1.0, 1.0], &[-1.0, 1.0, 2.0]]);
        let c = m(&[&[1.0, 2.0, -1.0]]);
        let classes = classify_eigenvalues(&a, &c, &tol()).unwrap();
        assert!(classes.iter().all(|e| (e.eigenvalue - re(1.0)).norm() < 1e-12 && !e.observable && !e.stable));
        let v = is_observable(&a, &c, &tol()).unwrap();
        assert!(!v.observable && v.consistent);
        let d = is_detectable(&a, &c, &tol()).unwrap();
        assert_eq!(d.witness.len(), 1);
    }

    #[test]
    fn observability_examples() {
        let v = is_observable(&m(&[&[0.0, 1.0], &[0.0, 0.0]]), &m(&[&[1.0, 0.0]]), &tol()).unwrap();
        assert!(v.observable && v.consistent);
        assert_eq!(v.stack_rank, 2);
        let v = is_observable(&RealMatrix::diag(&[0.5, 2.0]), &m(&[&[1.0, 0.0]]), &tol()).unwrap();
        assert!(!v.observable && v.consistent);
        assert!(is_observable(&m(&[&[0.5]]), &m(&[&[1.0]]), &tol()).unwrap().observable);
    }

    #[test]
    fn kalman_examples() {
        let a = RealMatrix::diag(&[0.5, 2.0]);
        let c = m(&[&[1.0, 0.0]]);
        let kd = kalman_decompose(&a, &c, &tol()).unwrap();
        assert_eq!(kd.q, 1);
        assert!((kd.a11[(0, 0)] - 0.5).abs() < 1e-15);
        assert!((kd.a22[(0, 0)] - 2.0).abs() < 1e-15);
        assert!((kd.c1[(0, 0)].abs() - 1.0).abs() < 1e-15);
        assert!(kd.reconstruct().max_abs_diff(&a).unwrap() < 1e-14);

        let obs = kalman_decompose(&m(&[&[0.0, 1.0], &[0.0, 0.0]]), &c, &tol()).unwrap();
        assert_eq!(obs.q, 2);
        assert_eq!(obs.t_k, RealMatrix::identity(2));
        assert_eq!(obs.a22.shape(), (0, 0));

        let kd = kalman_decompose(&RealMatrix::diag(&[0.1, 0.2]), &c, &tol()).unwrap();
        assert_eq!(kd.q, 1);
        assert!((kd.a22[(0, 0)] - 0.2).abs() < 1e-15);
        assert!(is_schur_stable(&kd.a22, 0.0).unwrap().stable);
    }

    #[test]
    fn staircase_needs_several_stages() {
        // Chain x3 → x2 → x1 → y plus a decoupled mode x4.
        let a = m(&[
            &[0.1, 1.0, 0.0, 0.0],
            &[0.0, 0.2, 1.0, 0.0],
            &[0.0, 0.0, 0.3, 0.0],
            &[0.0, 0.0, 0.0, 0.7],
        ]);
        let c = m(&[&[1.0, 0.0, 0.0, 0.0]]);
        let kd = kalman_decompose(&a, &c, &tol()).unwrap();
        assert_eq!(kd.q, 3);
        assert!((kd.a22[(0, 0)] - 0.7).abs() < 1e-14);
        assert!(kd.off_block_residual < 1e-14);
        let inner = is_observable(&kd.a11, &kd.c1, &tol()).unwrap();
        assert!(inner.observable);
    }

    #[test]
    fn system_requires_full_row_rank_c() {
        let a = RealMatrix::identity(2);
        let b = RealMatrix::column(&[1.0, 0.0]);
        let c = m(&[&[1.0, 1.0], &[2.0, 2.0]]);
        assert!(matches!(
            SystemRealization::new(a.clone(), b.clone(), c, 1e-9),
            Err(Error::RankDeficient { .. })
        ));
        assert!(SystemRealization::new(a.clone(), b.clone(), RealMatrix::zeros(1, 2), 1e-9).is_err());
        assert!(SystemRealization::new(a, RealMatrix::zeros(3, 1), m(&[&[1.0, 0.0]]), 1e-9).is_err());
    }
}
