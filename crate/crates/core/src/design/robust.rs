//! Multi-input pole assignment with well-conditioned closed-loop
//! eigenvectors (Kautsky–Nichols–Van Dooren, method 0).
//!
//! For `F + G·W` with `G = [U₀ U₁]·[Z; 0]`, every eigenvector `x` for a
//! pole `λ` must lie in `S(λ) = ker U₁ᴴ(F − λI)`. Each sweep replaces one
//! eigenvector by the projection onto its `S(λ)` of the direction
//! orthogonal to all the others, which drives `X` towards orthogonality.
//! The gain is then `W = Z⁻¹·U₀ᴴ·(X·Λ·X⁻¹ − F)`.

use num_complex::Complex64;

use crate::linalg::RealMatrix;

const SWEEPS: usize = 40;
const SWEEP_TOL: f64 = 1e-10;

/// Dense complex matrix, row-major.
#[derive(Debug, Clone)]
struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    fn from_real(m: &RealMatrix) -> Self {
        CMat {
            rows: m.rows(),
            cols: m.cols(),
            data: m.as_slice().iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    fn at_mut(&mut self, i: usize, j: usize) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }

    fn col(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.at(i, j)).collect()
    }

    fn set_col(&mut self, j: usize, v: &[Complex64]) {
        for (i, &x) in v.iter().enumerate() {
            *self.at_mut(i, j) = x;
        }
    }

    fn adjoint(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *t.at_mut(j, i) = self.at(i, j).conj();
            }
        }
        t
    }

    fn mul(&self, rhs: &CMat) -> CMat {
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    *out.at_mut(i, j) += a * rhs.at(k, j);
                }
            }
        }
        out
    }

    fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j) * x[j]).sum())
            .collect()
    }

    fn columns(&self, range: std::ops::Range<usize>) -> CMat {
        let mut out = Self::zeros(self.rows, range.len());
        for i in 0..self.rows {
            for (jj, j) in range.clone().enumerate() {
                *out.at_mut(i, jj) = self.at(i, j);
            }
        }
        out
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Householder QR with the full unitary factor: `a = Q·R`.
fn qr_full(a: &CMat) -> (CMat, CMat) {
    let (m, n) = (a.rows, a.cols);
    let mut r = a.clone();
    let mut q = CMat::identity(m);
    for k in 0..n.min(m) {
        let x: Vec<Complex64> = (k..m).map(|i| r.at(i, k)).collect();
        let xn = norm(&x);
        if xn == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { Complex64::new(1.0, 0.0) };
        let mut v = x;
        v[0] += phase * xn;
        let vn = norm(&v);
        v.iter_mut().for_each(|z| *z /= vn);
        for j in 0..n {
            let s: Complex64 = (k..m).map(|i| v[i - k].conj() * r.at(i, j)).sum();
            for i in k..m {
                *r.at_mut(i, j) -= 2.0 * v[i - k] * s;
            }
        }
        for i in 0..m {
            let s: Complex64 = (k..m).map(|l| q.at(i, l) * v[l - k]).sum();
            for l in k..m {
                *q.at_mut(i, l) -= 2.0 * s * v[l - k].conj();
            }
        }
    }
    (q, r)
}

/// `X⁻¹` by Gaussian elimination with partial pivoting; `None` when a
/// pivot falls below `tol·max|X|`.
fn inverse(x: &CMat, tol: f64) -> Option<CMat> {
    let n = x.rows;
    let scale = x.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut a = x.clone();
    let mut inv = CMat::identity(n);
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| a.at(i, k).norm().total_cmp(&a.at(j, k).norm()))?;
        if a.at(piv, k).norm() <= tol * scale {
            return None;
        }
        for j in 0..n {
            a.data.swap(k * n + j, piv * n + j);
            inv.data.swap(k * n + j, piv * n + j);
        }
        let d = a.at(k, k);
        for j in 0..n {
            *a.at_mut(k, j) /= d;
            *inv.at_mut(k, j) /= d;
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = a.at(i, k);
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                let (akj, ikj) = (a.at(k, j), inv.at(k, j));
                *a.at_mut(i, j) -= f * akj;
                *inv.at_mut(i, j) -= f * ikj;
            }
        }
    }
    Some(inv)
}

/// One closed-loop pole with the allowed eigenvector subspace.
struct Slot {
    pole: Complex64,
    /// Orthonormal basis of `S(λ)`, `n × dim`.
    basis: CMat,
    /// Index of the conjugate partner column, for the upper one of a pair.
    partner: Option<usize>,
    /// Lower member of a pair; updated through its partner.
    follower: bool,
}

/// Gain `W` (`p × n`) with `σ(F + G·W)` equal to `targets`, or `None` if the
/// eigenvector matrix cannot be made invertible (for instance when a pole
/// is repeated more than `p` times). `targets` must be conjugate closed
/// with exactly conjugate pairs.
pub(super) fn assign(f: &RealMatrix, g: &RealMatrix, targets: &[Complex64]) -> Option<RealMatrix> {
    let (n, p) = (f.rows(), g.cols());
    if targets.len() != n || p == 0 || p > n {
        return None;
    }
    let (qg, rg) = qr_full(&CMat::from_real(g));
    let u0 = qg.columns(0..p);
    let u1 = qg.columns(p..n);
    let fc = CMat::from_real(f);

    // Real poles first, then each upper-half pole followed by its conjugate.
    let mut order: Vec<Complex64> = targets.iter().copied().filter(|z| z.im == 0.0).collect();
    let mut lower: Vec<Complex64> = targets.iter().copied().filter(|z| z.im < 0.0).collect();
    for z in targets.iter().copied().filter(|z| z.im > 0.0) {
        let i = lower.iter().position(|w| *w == z.conj())?;
        lower.swap_remove(i);
        order.push(z);
        order.push(z.conj());
    }
    if !lower.is_empty() {
        return None;
    }

    let mut slots: Vec<Slot> = Vec::with_capacity(n);
    let mut x = CMat::zeros(n, n);
    let mut seen: Vec<(Complex64, usize)> = Vec::new();
    for (idx, &pole) in order.iter().enumerate() {
        if pole.im < 0.0 {
            let col: Vec<Complex64> = x.col(idx - 1).iter().map(|z| z.conj()).collect();
            x.set_col(idx, &col);
            slots.push(Slot {
                pole,
                basis: CMat::zeros(0, 0),
                partner: None,
                follower: true,
            });
            continue;
        }
        // S(λ) from the trailing columns of a full QR of (F − λI)ᴴ·U₁.
        let mut shifted = fc.clone();
        for i in 0..n {
            *shifted.at_mut(i, i) -= pole;
        }
        let (qn, _) = qr_full(&shifted.adjoint().mul(&u1));
        let basis = qn.columns(n - p..n);
        let occurrence = match seen.iter_mut().find(|(z, _)| *z == pole) {
            Some((_, k)) => {
                *k += 1;
                *k
            }
            None => {
                seen.push((pole, 0));
                0
            }
        };
        if occurrence >= p {
            return None;
        }
        // A real/imaginary mix keeps the two columns of a complex pair apart.
        let mut init = basis.col(occurrence);
        if pole.im > 0.0 {
            let other = basis.col((occurrence + 1) % p);
            init.iter_mut()
                .zip(&other)
                .for_each(|(a, b)| *a += Complex64::new(0.0, 0.5) * b);
            let nrm = norm(&init);
            init.iter_mut().for_each(|z| *z /= nrm);
        }
        x.set_col(idx, &init);
        slots.push(Slot {
            pole,
            basis,
            partner: (pole.im > 0.0).then_some(idx + 1),
            follower: false,
        });
    }

    for _ in 0..SWEEPS {
        let mut change: f64 = 0.0;
        for j in 0..n {
            let slot = &slots[j];
            if slot.follower {
                continue;
            }
            let others: Vec<usize> = (0..n).filter(|&k| k != j).collect();
            let mut rest = CMat::zeros(n, n - 1);
            for (c, &k) in others.iter().enumerate() {
                rest.set_col(c, &x.col(k));
            }
            let (q, _) = qr_full(&rest);
            let y = q.col(n - 1);
            let coeffs = slot.basis.adjoint().mul_vec(&y);
            let mut xn = slot.basis.mul_vec(&coeffs);
            let nrm = norm(&xn);
            if nrm < 1e-12 {
                continue;
            }
            xn.iter_mut().for_each(|z| *z /= nrm);
            // Eigenvectors are defined up to phase; align before comparing.
            let old = x.col(j);
            let ip: Complex64 = xn.iter().zip(&old).map(|(a, b)| a.conj() * b).sum();
            if ip.norm() > 0.0 {
                let ph = ip / ip.norm();
                xn.iter_mut().for_each(|z| *z *= ph);
            }
            change = change.max(xn.iter().zip(&old).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));
            x.set_col(j, &xn);
            if let Some(k) = slot.partner {
                let conj: Vec<Complex64> = xn.iter().map(|z| z.conj()).collect();
                x.set_col(k, &conj);
            }
        }
        if change < SWEEP_TOL {
            break;
        }
    }

    let x_inv = inverse(&x, 1e-12)?;
    let mut xl = x.clone();
    for (j, slot) in slots.iter().enumerate() {
        for i in 0..n {
            *xl.at_mut(i, j) *= slot.pole;
        }
    }
    let mut m = xl.mul(&x_inv);
    for (i, z) in m.data.iter_mut().enumerate() {
        *z -= fc.data[i];
    }
    // W = Z⁻¹·U₀ᴴ·(M − F) by back substitution on the triangular Z.
    let rhs = u0.adjoint().mul(&m);
    let mut w = CMat::zeros(p, n);
    for col in 0..n {
        for i in (0..p).rev() {
            let mut s = rhs.at(i, col);
            for k in i + 1..p {
                s -= rg.at(i, k) * w.at(k, col);
            }
            let d = rg.at(i, i);
            if d.norm() == 0.0 {
                return None;
            }
            *w.at_mut(i, col) = s / d;
        }
    }
    let scale = w.data.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if w.data.iter().any(|z| !(z.im.abs() <= 1e-8 * scale) || !z.re.is_finite()) {
        return None;
    }
    let real: Vec<f64> = w.data.iter().map(|z| z.re).collect();
    RealMatrix::from_row_slice(p, n, &real).ok()
}
