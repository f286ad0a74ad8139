//! Eigenvalues of dense real matrices.
//!
//! The matrix is balanced with exact power-of-two diagonal scaling, reduced to
//! upper Hessenberg form by Householder reflections, and the Hessenberg matrix
//! is driven to quasi-triangular form with the Francis implicit double-shift
//! QR iteration. Only eigenvalues are computed.

use num_complex::Complex64;

use super::matrix::RealMatrix;
use super::spectrum::Spectrum;
use crate::error::{Error, Result};

const MAX_ITER_PER_EIGENVALUE: usize = 60;

/// Computes all eigenvalues of a square real matrix.
pub fn eigenvalues(m: &RealMatrix) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(Error::dim("eigenvalues", "square matrix", format!("{}x{}", m.rows(), m.cols())));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite("eigenvalue input".into()));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Spectrum::new(Vec::new()));
    }
    let mut a = m.clone();
    balance(&mut a);
    let (mut h, _) = hessenberg(&a, false);
    let vals = hqr(&mut h)?;
    Ok(Spectrum::new(vals))
}

/// Spectral radius, `max |λ|`.
pub fn spectral_radius(m: &RealMatrix) -> Result<f64> {
    Ok(eigenvalues(m)?.radius())
}

/// Parlett–Reinsch balancing with radix-2 scaling; leaves the spectrum
/// unchanged exactly.
fn balance(a: &mut RealMatrix) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let n = a.rows();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= g;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// Householder reduction to upper Hessenberg form, `H = Qᵀ·A·Q`.
///
/// Row/column 0 is never touched by the reflections, so `Q·e₁ = e₁`; pole
/// placement relies on this. `Q` is only accumulated when `want_q` is set
/// (otherwise an empty matrix is returned in its place).
pub fn hessenberg(a: &RealMatrix, want_q: bool) -> (RealMatrix, RealMatrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = if want_q { RealMatrix::identity(n) } else { RealMatrix::zeros(0, 0) };
    if n < 3 {
        return (h, q);
    }
    let mut v = vec![0.0; n];
    for k in 0..n - 2 {
        let len = n - k - 1;
        let scale: f64 = (k + 1..n).map(|i| h[(i, k)].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut sigma = 0.0;
        for (t, i) in (k + 1..n).enumerate() {
            v[t] = h[(i, k)] / scale;
            sigma += v[t] * v[t];
        }
        let alpha = -v[0].signum() * sigma.sqrt();
        let alpha = if v[0] == 0.0 { -sigma.sqrt() } else { alpha };
        v[0] -= alpha;
        let vnorm2: f64 = v[..len].iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // H ← P H: rows k+1..n
        for j in 0..n {
            let dot: f64 = (k + 1..n).enumerate().map(|(t, i)| v[t] * h[(i, j)]).sum();
            let f = beta * dot;
            for (t, i) in (k + 1..n).enumerate() {
                h[(i, j)] -= f * v[t];
            }
        }
        // H ← H P: columns k+1..n
        for i in 0..n {
            let dot: f64 = (k + 1..n).enumerate().map(|(t, j)| h[(i, j)] * v[t]).sum();
            let f = beta * dot;
            for (t, j) in (k + 1..n).enumerate() {
                h[(i, j)] -= f * v[t];
            }
        }
        if want_q {
            for i in 0..n {
                let dot: f64 = (k + 1..n).enumerate().map(|(t, j)| q[(i, j)] * v[t]).sum();
                let f = beta * dot;
                for (t, j) in (k + 1..n).enumerate() {
                    q[(i, j)] -= f * v[t];
                }
            }
        }
        h[(k + 1, k)] = alpha * scale;
        for i in k + 2..n {
            h[(i, k)] = 0.0;
        }
    }
    (h, q)
}

/// Francis double-shift QR on an upper Hessenberg matrix (eigenvalues only).
/// Classic EISPACK `hqr` control flow with 1-based indices into a padded
/// working array.
fn hqr(h: &mut RealMatrix) -> Result<Vec<Complex64>> {
    let n = h.rows();
    let mut a = vec![vec![0.0f64; n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            a[i + 1][j + 1] = h[(i, j)];
        }
    }
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];

    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += a[i][j].abs();
        }
    }

    let mut nn = n;
    let mut t = 0.0;
    let (mut p, mut q, mut r, mut s, mut w, mut x, mut y, mut z);
    while nn >= 1 {
        let mut its = 0;
        loop {
            // Look for a single small subdiagonal element.
            let mut l = nn;
            while l >= 2 {
                s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() <= f64::EPSILON * s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            x = a[nn][nn];
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
                break;
            }
            y = a[nn - 1][nn - 1];
            w = a[nn][nn - 1] * a[nn - 1][nn];
            if l == nn - 1 {
                p = 0.5 * (y - x);
                q = p * p + w;
                z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + z.copysign(p);
                    wr[nn - 1] = x + z;
                    wr[nn] = x + z;
                    if z != 0.0 {
                        wr[nn] = x - w / z;
                    }
                    wi[nn - 1] = 0.0;
                    wi[nn] = 0.0;
                } else {
                    wr[nn - 1] = x + p;
                    wr[nn] = x + p;
                    wi[nn - 1] = -z;
                    wi[nn] = z;
                }
                nn = nn.saturating_sub(2);
                break;
            }

            if its == MAX_ITER_PER_EIGENVALUE {
                return Err(Error::NoConvergence("Hessenberg QR iteration".into()));
            }
            if its % 10 == 0 && its > 0 {
                // Exceptional shift.
                t += x;
                for i in 1..=nn {
                    a[i][i] -= x;
                }
                s = a[nn][nn - 1].abs() + a[nn - 1][nn - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;

            // Look for two consecutive small subdiagonal elements.
            let mut m = nn - 2;
            loop {
                z = a[m][m];
                r = x - z;
                s = y - z;
                p = (r * s - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - r - s;
                r = a[m + 2][m + 1];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                if u <= f64::EPSILON * v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nn {
                a[i][i - 2] = 0.0;
                if i != m + 2 {
                    a[i][i - 3] = 0.0;
                }
            }
            // Double QR step on rows l..nn and columns m..nn.
            let mut k = m;
            while k < nn {
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = if k != nn - 1 { a[k + 2][k - 1] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nn {
                        p = a[k][j] + q * a[k + 1][j];
                        if k != nn - 1 {
                            p += r * a[k + 2][j];
                            a[k + 2][j] -= p * z;
                        }
                        a[k + 1][j] -= p * y;
                        a[k][j] -= p * x;
                    }
                    let mmin = nn.min(k + 3);
                    for i in l..=mmin {
                        p = x * a[i][k] + y * a[i][k + 1];
                        if k != nn - 1 {
                            p += z * a[i][k + 2];
                            a[i][k + 2] -= p * r;
                        }
                        a[i][k + 1] -= p * q;
                        a[i][k] -= p;
                    }
                }
                k += 1;
            }
            if l >= nn - 1 {
                break;
            }
        }
    }
    Ok((1..=n).map(|i| Complex64::new(wr[i], wi[i])).collect())
}
