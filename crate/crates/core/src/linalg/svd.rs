//! One-sided Jacobi SVD and the rank tests built on it.

use num_complex::Complex64;

use super::matrix::RealMatrix;

const MAX_SWEEPS: usize = 80;

/// Singular values (descending) and the matching right singular vectors as
/// the columns of an orthogonal `cols × cols` matrix.
#[derive(Debug, Clone)]
pub struct Svd {
    pub singular_values: Vec<f64>,
    pub v: RealMatrix,
}

/// Computes singular values and right singular vectors. Wide matrices are
/// padded with zero rows, so `v` always spans the full column space
/// (including the null space).
pub fn svd(m: &RealMatrix) -> Svd {
    let (rows, n) = m.shape();
    let rows_p = rows.max(n);
    // Column-major working copy for cache-friendly column rotations.
    let mut w: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut col = m.col_vec(j);
            col.resize(rows_p, 0.0);
            col
        })
        .collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let alpha: f64 = w[i].iter().map(|x| x * x).sum();
                let beta: f64 = w[j].iter().map(|x| x * x).sum();
                let gamma: f64 = w[i].iter().zip(&w[j]).map(|(a, b)| a * b).sum();
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, i, j, c, s);
                rotate(&mut v, i, j, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = w.iter().map(|col| col.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    let mut vm = RealMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            vm[(i, dst)] = v[src][i];
        }
    }
    Svd {
        singular_values: order.iter().map(|&k| norms[k]).collect(),
        v: vm,
    }
}

fn rotate(cols: &mut [Vec<f64>], i: usize, j: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(j);
    let (ci, cj) = (&mut left[i], &mut right[0]);
    for (a, b) in ci.iter_mut().zip(cj.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = c * x - s * y;
        *b = s * x + c * y;
    }
}

pub fn singular_values(m: &RealMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    // Jacobi on the narrower orientation.
    if m.rows() < m.cols() {
        svd(&m.transpose()).singular_values
    } else {
        svd(m).singular_values
    }
}

/// Number of singular values above `tol_rank × σ_max`; 0 for the zero matrix.
pub fn numerical_rank(m: &RealMatrix, tol_rank: f64) -> usize {
    count_above(&singular_values(m), tol_rank)
}

fn count_above(sv: &[f64], tol_rank: f64) -> usize {
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol_rank * smax).count()
}

/// Singular values of a complex matrix given as rows of `Complex64`.
///
/// Uses the real embedding `[[Re, −Im], [Im, Re]]`, whose singular values are
/// those of the complex matrix, each repeated twice.
pub fn complex_singular_values(rows: usize, cols: usize, entries: &[Complex64]) -> Vec<f64> {
    assert_eq!(entries.len(), rows * cols);
    let mut emb = RealMatrix::zeros(2 * rows, 2 * cols);
    for i in 0..rows {
        for j in 0..cols {
            let z = entries[i * cols + j];
            emb[(i, j)] = z.re;
            emb[(i, cols + j)] = -z.im;
            emb[(rows + i, j)] = z.im;
            emb[(rows + i, cols + j)] = z.re;
        }
    }
    let sv = singular_values(&emb);
    sv.chunks(2).map(|pair| pair.iter().sum::<f64>() / pair.len() as f64).collect()
}

pub fn complex_numerical_rank(rows: usize, cols: usize, entries: &[Complex64], tol_rank: f64) -> usize {
    count_above(&complex_singular_values(rows, cols, entries), tol_rank)
}
