//! Output-injection pole placement: find `K` so that `A + K·C` has a
//! prescribed spectrum.
//!
//! Works on the dual pair `(Aᵀ, Cᵀ)`. A single input column `g = Cᵀw` is
//! reduced orthogonally to controller-Hessenberg form (`Qᵀg = β·e₁`,
//! `QᵀAᵀQ` upper Hessenberg), where Ackermann's formula collapses to one
//! row of `φ(H)` divided by `β·∏ h_{i+1,i}`. With several outputs the
//! eigenvector-conditioning assignment of the `robust` module is tried
//! first. If it fails (a pole repeated more than `p` times, a singular
//! eigenvector matrix, or a spectrum check miss) a rank-one gain `Cᵀw·kᵀ`
//! is used instead: the mixing vector `w` is chosen among unit and seeded
//! random directions by smallest resulting gain, and when no direction
//! makes the dual pair single-input controllable (non-cyclic `A`) a random
//! pre-injection is applied first.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::analysis::{is_observable, kalman_decompose};
use crate::error::{Error, Result};
use crate::linalg::{complex_singular_values, eigenvalues, hessenberg, pairing_distance, RealMatrix};

use super::robust;
use crate::tolerances::Tolerances;

/// Relative controllability level below which a mixing direction is
/// treated as losing controllability.
const MIN_CONTROLLABILITY: f64 = 1e-8;
const RANDOM_DIRECTIONS: usize = 8;
const PRE_INJECTION_ATTEMPTS: usize = 6;

/// Relative eigenvalue error accepted from the robust assignment before
/// falling back to the rank-one construction.
const ROBUST_ACCEPT: f64 = 1e-8;

/// Real factor of the target polynomial.
#[derive(Debug, Clone, Copy)]
enum Factor {
    /// `z − r`
    Linear(f64),
    /// `z² − s·z + p`
    Quadratic(f64, f64),
}

fn factorize(targets: &[Complex64], tol_eig: f64) -> Result<Vec<Factor>> {
    let mut factors = Vec::new();
    let mut pending: Vec<Complex64> = Vec::new();
    for &z in targets {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::InvalidConfig("target pole is not finite".into()));
        }
        let scale = z.norm().max(1.0);
        if z.im.abs() <= tol_eig * scale {
            factors.push(Factor::Linear(z.re));
        } else {
            pending.push(z);
        }
    }
    // Pair each upper-half-plane pole with its nearest unpaired conjugate.
    let (upper, mut lower): (Vec<Complex64>, Vec<Complex64>) = pending.into_iter().partition(|z| z.im > 0.0);
    for z in upper {
        let idx = lower
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - z.conj()).norm().total_cmp(&(b.1 - z.conj()).norm()))
            .map(|(i, _)| i);
        match idx {
            Some(i) if (lower[i] - z.conj()).norm() <= tol_eig * z.norm().max(1.0) => {
                let w = lower.swap_remove(i);
                let mean = (z + w.conj()) * 0.5;
                factors.push(Factor::Quadratic(2.0 * mean.re, mean.norm_sqr()));
            }
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "target poles are not closed under conjugation: {z} has no partner"
                )))
            }
        }
    }
    if let Some(z) = lower.first() {
        return Err(Error::InvalidConfig(format!(
            "target poles are not closed under conjugation: {z} has no partner"
        )));
    }
    Ok(factors)
}

/// Exactly conjugate-closed roots of the factors.
fn roots(factors: &[Factor]) -> Vec<Complex64> {
    let mut out = Vec::new();
    for factor in factors {
        match *factor {
            Factor::Linear(r) => out.push(Complex64::new(r, 0.0)),
            Factor::Quadratic(s, p) => {
                let disc = p - 0.25 * s * s;
                if disc > 0.0 {
                    let z = Complex64::new(0.5 * s, disc.sqrt());
                    out.push(z);
                    out.push(z.conj());
                } else {
                    let d = (-disc).sqrt();
                    out.push(Complex64::new(0.5 * s + d, 0.0));
                    out.push(Complex64::new(0.5 * s - d, 0.0));
                }
            }
        }
    }
    out
}

/// Robust multi-output gain `K`, accepted only if `σ(A + K·C)` lands on the
/// targets.
fn robust_gain(f: &RealMatrix, g: &RealMatrix, a: &RealMatrix, c: &RealMatrix, factors: &[Factor]) -> Option<RealMatrix> {
    let targets = roots(factors);
    let k = robust::assign(f, g, &targets)?.transpose();
    let closed = a + &(&k * c);
    let got = eigenvalues(&closed).ok()?;
    let err = pairing_distance(got.values(), &targets)?;
    let scale = targets.iter().map(|z| z.norm()).fold(1.0, f64::max);
    (err <= ROBUST_ACCEPT * scale).then_some(k)
}

/// Gain for the single-input dual problem: returns `k` with
/// `σ(F + g·kᵀ)` equal to the roots of the factors, plus the relative
/// controllability level of `(F, g)`.
fn place_single_input(f: &RealMatrix, g: &[f64], factors: &[Factor]) -> (Vec<f64>, f64) {
    let n = f.rows();
    let gnorm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    let scale = f.norm_fro().max(gnorm).max(f64::MIN_POSITIVE);
    if gnorm == 0.0 {
        return (vec![0.0; n], 0.0);
    }

    // Householder Q0 with Q0·g = β·e₁.
    let beta = if g[0] >= 0.0 { -gnorm } else { gnorm };
    let mut v = g.to_vec();
    v[0] -= beta;
    let vv: f64 = v.iter().map(|x| x * x).sum();
    let mut q0 = RealMatrix::identity(n);
    if vv > 0.0 {
        for i in 0..n {
            for j in 0..n {
                q0[(i, j)] -= 2.0 * v[i] * v[j] / vv;
            }
        }
    }
    let f1 = &(&q0 * f) * &q0;
    let (h, q1) = hessenberg(&f1, true);
    let q = &q0 * &q1;

    let mut level = beta.abs();
    let mut denom = beta;
    for i in 0..n.saturating_sub(1) {
        let sub = h[(i + 1, i)];
        level = level.min(sub.abs());
        denom *= sub;
    }
    if denom == 0.0 {
        return (vec![0.0; n], 0.0);
    }

    // r = e_nᵀ·φ(H)
    let mut r = vec![0.0; n];
    r[n - 1] = 1.0;
    let row_times_h = |r: &[f64]| -> Vec<f64> { (0..n).map(|j| (0..n).map(|i| r[i] * h[(i, j)]).sum()).collect() };
    for factor in factors {
        match *factor {
            Factor::Linear(root) => {
                let rh = row_times_h(&r);
                r = rh.iter().zip(&r).map(|(a, b)| a - root * b).collect();
            }
            Factor::Quadratic(s, p) => {
                let rh = row_times_h(&r);
                let rhh = row_times_h(&rh);
                r = (0..n).map(|j| rhh[j] - s * rh[j] + p * r[j]).collect();
            }
        }
    }
    let kh: Vec<f64> = r.iter().map(|x| -x / denom).collect();
    (q.mul_vec(&kh), level / scale)
}

/// Assigns `σ(A + K·C)` to `targets` for an observable pair.
pub fn place_poles_observable(
    a: &RealMatrix,
    c: &RealMatrix,
    targets: &[Complex64],
    tol: &Tolerances,
    seed: u64,
) -> Result<RealMatrix> {
    let n = a.rows();
    if targets.len() != n {
        return Err(Error::InvalidConfig(format!(
            "expected {n} target poles, got {}",
            targets.len()
        )));
    }
    let factors = factorize(targets, tol.eig)?;
    if !is_observable(a, c, tol)?.observable {
        return Err(Error::Unobservable);
    }
    let p = c.rows();
    let f = a.transpose();
    let gmat = c.transpose();

    if p == 1 {
        let (k, level) = place_single_input(&f, &gmat.col_vec(0), &factors);
        if level <= 0.0 {
            return Err(Error::Unobservable);
        }
        return Ok(RealMatrix::column(&k));
    }

    if let Some(k) = robust_gain(&f, &gmat, a, c, &factors) {
        return Ok(k);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pre = RealMatrix::zeros(p, n);
    for attempt in 0..=PRE_INJECTION_ATTEMPTS {
        let f_eff = &f + &(&gmat * &pre);
        let mut directions: Vec<Vec<f64>> = (0..p)
            .map(|j| {
                let mut e = vec![0.0; p];
                e[j] = 1.0;
                e
            })
            .collect();
        for _ in 0..RANDOM_DIRECTIONS {
            let w: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            directions.push(w.iter().map(|x| x / norm).collect());
        }

        let mut best: Option<(f64, Vec<f64>, Vec<f64>)> = None;
        for w in directions {
            let g = gmat.mul_vec(&w);
            let (k, level) = place_single_input(&f_eff, &g, &factors);
            if level < MIN_CONTROLLABILITY || k.iter().any(|x| !x.is_finite()) {
                continue;
            }
            let gain = k.iter().map(|x| x * x).sum::<f64>().sqrt();
            if best.as_ref().is_none_or(|b| gain < b.0) {
                best = Some((gain, k, w));
            }
        }
        if let Some((_, k, w)) = best {
            // Kᵀ = pre + w·kᵀ
            let mut kt = pre.clone();
            for i in 0..p {
                for j in 0..n {
                    kt[(i, j)] += w[i] * k[j];
                }
            }
            return Ok(kt.transpose());
        }
        if attempt < PRE_INJECTION_ATTEMPTS {
            let s = f.norm_fro().max(1.0) / gmat.norm_fro().max(f64::MIN_POSITIVE);
            for i in 0..p {
                for j in 0..n {
                    pre[(i, j)] = 0.5 * s * rng.random_range(-1.0..1.0);
                }
            }
        }
    }
    Err(Error::NoConvergence("cyclic reduction for multi-output pole placement".into()))
}

/// Stabilizing output-injection gain with the provenance of its spectrum.
#[derive(Debug, Clone)]
pub struct StabilizingGain {
    pub k: RealMatrix,
    /// Dimension of the observable block.
    pub q: usize,
    /// Poles assigned to the observable block.
    pub assigned: Vec<Complex64>,
    /// Unobservable eigenvalues carried over unchanged.
    pub inherited: Vec<Complex64>,
}

/// An open-loop eigenvalue of the observable block and how clearly the
/// output sees it: the smallest singular value of `[λI − A; C/‖C‖]`.
/// Moving a mode costs a gain of roughly the shift divided by this number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpenLoopMode {
    pub pole: Complex64,
    pub visibility: f64,
}

fn open_loop_modes(a: &RealMatrix, c: &RealMatrix) -> Result<Vec<OpenLoopMode>> {
    let (n, p) = (a.rows(), c.rows());
    let c_norm = c.norm_fro();
    let modes = eigenvalues(a)?
        .values()
        .iter()
        .map(|&pole| {
            // Conjugates get the same value by construction.
            let z = Complex64::new(pole.re, pole.im.abs());
            let mut entries = Vec::with_capacity((n + p) * n);
            for i in 0..n {
                for j in 0..n {
                    let d = if i == j { z } else { Complex64::new(0.0, 0.0) };
                    entries.push(d - a[(i, j)]);
                }
            }
            for i in 0..p {
                for j in 0..n {
                    entries.push(Complex64::new(c[(i, j)] / c_norm, 0.0));
                }
            }
            let visibility = complex_singular_values(n + p, n, &entries).last().copied().unwrap_or(0.0);
            OpenLoopMode { pole, visibility }
        })
        .collect();
    Ok(modes)
}

/// Gain `K` with `A + K·C` Schur stable. Observable pairs are placed
/// directly; for detectable unobservable pairs the observable block of the
/// staircase decomposition is placed and the unobservable block is left
/// untouched, `K = T_k·[K₁; 0]`.
///
/// `targets` picks the assigned poles; it is called with the open-loop
/// modes of the observable block and the inherited eigenvalues.
pub fn place_stabilizing_gain(
    a: &RealMatrix,
    c: &RealMatrix,
    targets: impl FnOnce(&[OpenLoopMode], &[Complex64]) -> Result<Vec<Complex64>>,
    margin: f64,
    tol: &Tolerances,
    seed: u64,
) -> Result<StabilizingGain> {
    let det = crate::analysis::is_detectable(a, c, tol)?;
    if !det.detectable {
        return Err(Error::Infeasible { witness: det.witness });
    }
    let n = a.rows();
    let kd = kalman_decompose(a, c, tol)?;
    let inherited = kd.unobservable_eigenvalues()?.sorted();
    let modes = if kd.q == n { open_loop_modes(a, c)? } else { open_loop_modes(&kd.a11, &kd.c1)? };
    let assigned = targets(&modes, &inherited)?;
    let k = if kd.q == n {
        place_poles_observable(a, c, &assigned, tol, seed)?
    } else {
        let k1 = place_poles_observable(&kd.a11, &kd.c1, &assigned, tol, seed)?;
        let mut stacked = RealMatrix::zeros(n, c.rows());
        stacked.set_block(0, 0, &k1);
        &kd.t_k * &stacked
    };
    let closed = a + &(&k * c);
    let verdict = crate::analysis::is_schur_stable(&closed, margin)?;
    if !verdict.stable {
        return Err(Error::NotSchurStable {
            what: "A + KC".into(),
            radius: verdict.radius,
        });
    }
    Ok(StabilizingGain {
        k,
        q: kd.q,
        assigned,
        inherited,
    })
}
