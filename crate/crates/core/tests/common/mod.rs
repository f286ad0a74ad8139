//! Seeded generators of test systems shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use piobs::RealMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Largest eigenvalue magnitude of randomly generated plants. Plants are
/// allowed to be unstable, but only mildly, so that a 500-step simulation
/// stays far from overflow and from cancellation in `x̂ − x`.
pub const MAX_PLANT_MAGNITUDE: f64 = 1.03;

/// Minimum distance between generated eigenvalues. Nearly coincident modes
/// seen through fewer outputs than their count are nearly unobservable, and
/// any gain that moves them is huge.
pub const MIN_SEPARATION: f64 = 0.02;

pub struct Gen {
    rng: ChaCha8Rng,
}

pub struct Plant {
    pub a: RealMatrix,
    pub b: RealMatrix,
    pub c: RealMatrix,
    /// Eigenvalues of `A` as constructed.
    pub spectrum: Vec<Complex64>,
}

pub struct KalmanForm {
    pub a: RealMatrix,
    pub c: RealMatrix,
    /// Observable block dimension.
    pub q: usize,
    pub observable_spectrum: Vec<Complex64>,
    pub unobservable_spectrum: Vec<Complex64>,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.random_range(lo..=hi)
    }

    pub fn int_matrix(&mut self, rows: usize, cols: usize, lo: i64, hi: i64) -> Vec<Vec<i128>> {
        (0..rows).map(|_| (0..cols).map(|_| self.int(lo, hi) as i128).collect()).collect()
    }

    pub fn size(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.random_range(lo..=hi)
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }

    pub fn seed(&mut self) -> u64 {
        self.rng.random()
    }

    pub fn gaussian(&mut self, rows: usize, cols: usize) -> RealMatrix {
        let data: Vec<f64> = (0..rows * cols).map(|_| self.normal()).collect();
        RealMatrix::from_row_slice(rows, cols, &data).unwrap()
    }

    pub fn vector(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.normal()).collect()
    }

    /// Haar-ish orthogonal matrix from Gram–Schmidt on a Gaussian matrix.
    pub fn orthogonal(&mut self, n: usize) -> RealMatrix {
        let g = self.gaussian(n, n);
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
        for j in 0..n {
            let mut v = g.col_vec(j);
            for _ in 0..2 {
                for u in &cols {
                    let d: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
                    v.iter_mut().zip(u).for_each(|(x, u)| *x -= d * u);
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
            cols.push(v);
        }
        let mut q = RealMatrix::zeros(n, n);
        for (j, c) in cols.iter().enumerate() {
            for i in 0..n {
                q[(i, j)] = c[i];
            }
        }
        q
    }

    /// `(W, W⁻¹)` with singular values of `W` in `[0.5, 2]`.
    pub fn conditioned_pair(&mut self, n: usize) -> (RealMatrix, RealMatrix) {
        let (u, v) = (self.orthogonal(n), self.orthogonal(n));
        let s: Vec<f64> = (0..n).map(|_| self.uniform(0.5, 2.0)).collect();
        let inv: Vec<f64> = s.iter().map(|x| 1.0 / x).collect();
        let w = &(&u * &RealMatrix::diag(&s)) * &v.transpose();
        let w_inv = &(&v * &RealMatrix::diag(&inv)) * &u.transpose();
        (w, w_inv)
    }

    /// Conjugate-closed multiset of `n` values with magnitudes in `[lo, hi)`,
    /// pairwise at least [`MIN_SEPARATION`] apart.
    pub fn spectrum(&mut self, n: usize, lo: f64, hi: f64) -> Vec<Complex64> {
        self.spectrum_avoiding(n, lo, hi, &[])
    }

    /// As [`Gen::spectrum`], also kept [`MIN_SEPARATION`] away from `avoid`.
    pub fn spectrum_avoiding(&mut self, n: usize, lo: f64, hi: f64, avoid: &[Complex64]) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = Vec::with_capacity(n);
        while out.len() < n {
            let r = self.uniform(lo, hi);
            let fresh = if n - out.len() >= 2 && self.coin(0.4) {
                let th = self.uniform(0.1, std::f64::consts::PI - 0.1);
                vec![Complex64::from_polar(r, th), Complex64::from_polar(r, -th)]
            } else {
                let s = if self.coin(0.5) { 1.0 } else { -1.0 };
                vec![Complex64::new(s * r, 0.0)]
            };
            let clear = |z: &Complex64| out.iter().chain(avoid).all(|w| (z - w).norm() >= MIN_SEPARATION);
            let pair_apart = fresh.len() == 1 || (fresh[0] - fresh[1]).norm() >= MIN_SEPARATION;
            if pair_apart && fresh.iter().all(clear) {
                out.extend(fresh);
            }
        }
        out
    }

    /// Real block-diagonal matrix with the given conjugate-closed spectrum
    /// (in the order produced by [`Gen::spectrum`]).
    pub fn block_diag(spectrum: &[Complex64]) -> RealMatrix {
        let n = spectrum.len();
        let mut d = RealMatrix::zeros(n, n);
        let mut i = 0;
        while i < n {
            let z = spectrum[i];
            if z.im == 0.0 {
                d[(i, i)] = z.re;
                i += 1;
            } else {
                d[(i, i)] = z.re;
                d[(i + 1, i + 1)] = z.re;
                d[(i, i + 1)] = z.im;
                d[(i + 1, i)] = -z.im;
                i += 2;
            }
        }
        d
    }

    /// Random matrix similar to a block-diagonal one with spectrum
    /// magnitudes in `[lo, hi)`.
    pub fn matrix_with_spectrum(&mut self, n: usize, lo: f64, hi: f64) -> (RealMatrix, Vec<Complex64>) {
        let spectrum = self.spectrum(n, lo, hi);
        let (w, w_inv) = self.conditioned_pair(n);
        (&(&w * &Self::block_diag(&spectrum)) * &w_inv, spectrum)
    }

    /// Observable pair with a mildly unstable-or-stable random `A`.
    pub fn observable_plant(&mut self, n: usize, m: usize, p: usize) -> Plant {
        let (a, spectrum) = self.matrix_with_spectrum(n, 0.0, MAX_PLANT_MAGNITUDE);
        Plant {
            a,
            b: self.gaussian(n, m),
            c: self.gaussian(p, n),
            spectrum,
        }
    }

    /// `(A, C)` similar to `[[A11, 0], [A21, A22]]`, `[C1, 0]` with the
    /// given block spectra.
    pub fn kalman_form(&mut self, obs: Vec<Complex64>, unobs: Vec<Complex64>, p: usize) -> KalmanForm {
        let q = obs.len();
        let n = q + unobs.len();
        let (w1, w1i) = self.conditioned_pair(q);
        let (w2, w2i) = self.conditioned_pair(n - q);
        let a11 = &(&w1 * &Self::block_diag(&obs)) * &w1i;
        let a22 = &(&w2 * &Self::block_diag(&unobs)) * &w2i;
        let mut blk = RealMatrix::zeros(n, n);
        blk.set_block(0, 0, &a11);
        blk.set_block(q, q, &a22);
        blk.set_block(q, 0, &self.gaussian(n - q, q).scaled(0.5));
        let mut c = RealMatrix::zeros(p, n);
        c.set_block(0, 0, &self.gaussian(p, q));
        let (w, w_inv) = self.conditioned_pair(n);
        KalmanForm {
            a: &(&w * &blk) * &w_inv,
            c: &c * &w_inv,
            q,
            observable_spectrum: obs,
            unobservable_spectrum: unobs,
        }
    }

    /// Detectable pair with a nontrivial stable unobservable block.
    pub fn unobservable_detectable(&mut self, n: usize, p: usize) -> KalmanForm {
        assert!(n > p);
        let q = self.size(p, n - 1);
        let obs = self.spectrum(q, 0.0, MAX_PLANT_MAGNITUDE);
        let unobs = self.spectrum_avoiding(n - q, 0.0, 0.9, &obs);
        self.kalman_form(obs, unobs, p)
    }

    /// Random Schur-stable `p × p` matrix with radius below `hi`.
    pub fn stable_matrix(&mut self, p: usize, hi: f64) -> RealMatrix {
        self.matrix_with_spectrum(p, 0.05, hi).0
    }
}
