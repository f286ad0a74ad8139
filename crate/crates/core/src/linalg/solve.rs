use super::matrix::RealMatrix;
use crate::error::{Error, Result};

/// Default lower bound on the reciprocal 1-norm condition number.
pub const DEFAULT_TOL_SING: f64 = 1e-13;

/// LU factorisation with partial pivoting, `P·M = L·U`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: RealMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(m: &RealMatrix) -> Result<Lu> {
        if !m.is_square() {
            return Err(Error::dim("LU factorisation", "square matrix", format!("{}x{}", m.rows(), m.cols())));
        }
        let n = m.rows();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let piv = (k..n)
                .max_by(|&a, &b| lu[(a, k)].abs().total_cmp(&lu[(b, k)].abs()))
                .unwrap_or(k);
            if lu[(piv, k)] == 0.0 {
                return Err(Error::Singular { rcond: 0.0 });
            }
            if piv != k {
                perm.swap(piv, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(piv, j)];
                    lu[(piv, j)] = tmp;
                }
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        lu[(i, j)] -= f * lu[(k, j)];
                    }
                }
            }
        }
        Ok(Lu { lu, perm })
    }

    pub fn solve(&self, rhs: &RealMatrix) -> Result<RealMatrix> {
        let n = self.lu.rows();
        if rhs.rows() != n {
            return Err(Error::dim("solve right-hand side", n, rhs.rows()));
        }
        let mut y = RealMatrix::zeros(n, rhs.cols());
        for c in 0..rhs.cols() {
            let mut x: Vec<f64> = self.perm.iter().map(|&p| rhs[(p, c)]).collect();
            for i in 0..n {
                for k in 0..i {
                    x[i] -= self.lu[(i, k)] * x[k];
                }
            }
            for i in (0..n).rev() {
                for k in i + 1..n {
                    x[i] -= self.lu[(i, k)] * x[k];
                }
                x[i] /= self.lu[(i, i)];
            }
            for i in 0..n {
                y[(i, c)] = x[i];
            }
        }
        Ok(y)
    }

    pub fn determinant(&self) -> f64 {
        let n = self.lu.rows();
        let mut det: f64 = (0..n).map(|i| self.lu[(i, i)]).product();
        let mut seen = vec![false; n];
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                j = self.perm[j];
                len += 1;
            }
            if len % 2 == 0 {
                det = -det;
            }
        }
        det
    }
}

/// Reciprocal 1-norm condition number `1 / (‖M‖₁ ‖M⁻¹‖₁)`, computed from the
/// explicit inverse (matrices here are small).
pub fn rcond(m: &RealMatrix) -> Result<f64> {
    let lu = Lu::factor(m)?;
    let inv = lu.solve(&RealMatrix::identity(m.rows()))?;
    let denom = m.norm_one() * inv.norm_one();
    Ok(if denom == 0.0 || !denom.is_finite() { 0.0 } else { 1.0 / denom })
}

/// Solves `M·Y = RHS`, refusing matrices whose reciprocal condition number is
/// at or below `tol_sing`.
pub fn solve_with(m: &RealMatrix, rhs: &RealMatrix, tol_sing: f64) -> Result<RealMatrix> {
    if !m.is_finite() || !rhs.is_finite() {
        return Err(Error::NonFinite("solve input".into()));
    }
    let lu = Lu::factor(m)?;
    let inv = lu.solve(&RealMatrix::identity(m.rows()))?;
    let denom = m.norm_one() * inv.norm_one();
    let rc = if denom == 0.0 || !denom.is_finite() { 0.0 } else { 1.0 / denom };
    if rc <= tol_sing {
        return Err(Error::Singular { rcond: rc });
    }
    lu.solve(rhs)
}

pub fn solve(m: &RealMatrix, rhs: &RealMatrix) -> Result<RealMatrix> {
    solve_with(m, rhs, DEFAULT_TOL_SING)
}

pub fn determinant(m: &RealMatrix) -> Result<f64> {
    match Lu::factor(m) {
        Ok(lu) => Ok(lu.determinant()),
        Err(Error::Singular { .. }) => Ok(0.0),
        Err(e) => Err(e),
    }
}
