use super::matrix::RealMatrix;
use super::svd::numerical_rank;
use crate::error::{Error, Result};

/// Relative threshold for pivot selection: the first column whose entry is
/// within this factor of the row maximum wins. Keeps integer-friendly
/// completions (`[1, 2]` pivots on column 1) while bounding growth.
const PIVOT_THRESHOLD: f64 = 0.1;

/// Completes a full-row-rank `p × n` matrix `C` to a nonsingular `n × n`
/// matrix `T` with `C` as its first `p` rows, so that `[I_p, 0]·T = C`
/// holds exactly. The remaining rows are standard basis vectors at the
/// columns left unpivoted by threshold-pivoted elimination on `C`.
pub fn complete_row_basis(c: &RealMatrix, tol_rank: f64) -> Result<RealMatrix> {
    let (p, n) = c.shape();
    if p > n {
        return Err(Error::dim("basis completion", format!("at most {n} rows"), p));
    }
    let rank = numerical_rank(c, tol_rank);
    if rank < p {
        return Err(Error::RankDeficient {
            context: "output matrix C".into(),
            rank,
            expected: p,
        });
    }

    let mut w = c.clone();
    let mut pivot_col = vec![false; n];
    for i in 0..p {
        let row_max = (0..n)
            .filter(|&j| !pivot_col[j])
            .map(|j| w[(i, j)].abs())
            .fold(0.0, f64::max);
        if row_max == 0.0 {
            return Err(Error::RankDeficient {
                context: "output matrix C".into(),
                rank: i,
                expected: p,
            });
        }
        let j = (0..n)
            .find(|&j| !pivot_col[j] && w[(i, j)].abs() >= PIVOT_THRESHOLD * row_max)
            .expect("row maximum is attained");
        pivot_col[j] = true;
        let pivot = w[(i, j)];
        for r in i + 1..p {
            let f = w[(r, j)] / pivot;
            if f != 0.0 {
                for k in 0..n {
                    w[(r, k)] -= f * w[(i, k)];
                }
            }
        }
    }

    let mut t = RealMatrix::zeros(n, n);
    t.set_block(0, 0, c);
    for (row, j) in (p..n).zip((0..n).filter(|&j| !pivot_col[j])) {
        t[(row, j)] = 1.0;
    }
    Ok(t)
}
