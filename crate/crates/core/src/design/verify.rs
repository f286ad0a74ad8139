use num_complex::Complex64;
use serde::Serialize;

use super::PiObserver;
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, pairing_distance, RealMatrix};

/// Largest acceptable bottleneck distance between `σ(augmented)` and
/// `σ(A + KC) ⊎ σ(Φ)`.
pub const SPECTRUM_SPLIT_TOL: f64 = 1e-6;
/// Bound on `‖I_p − C·X − Φ‖∞`.
pub const INTEGRAL_IDENTITY_TOL: f64 = 1e-10;
/// Bound on the similarity residual relative to
/// `max(1, ‖augmented‖∞)·(1 + ‖X‖∞)²`.
pub const SIMILARITY_TOL: f64 = 1e-10;

/// `[[A − LC, F], [−C, I_p]]`, the matrix driving `[e(k); v(k)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedMatrix {
    matrix: RealMatrix,
    n: usize,
    p: usize,
}

impl AugmentedMatrix {
    pub fn assemble(a: &RealMatrix, c: &RealMatrix, l: &RealMatrix, f: &RealMatrix) -> Result<Self> {
        let (n, p) = (a.rows(), c.rows());
        if l.shape() != (n, p) {
            return Err(Error::dim("L", format!("{n}x{p}"), format!("{}x{}", l.rows(), l.cols())));
        }
        if f.shape() != (n, p) {
            return Err(Error::dim("F", format!("{n}x{p}"), format!("{}x{}", f.rows(), f.cols())));
        }
        let a_lc = a.try_sub(&l.matmul(c)?)?;
        let matrix = RealMatrix::from_blocks(&a_lc, f, &-c, &RealMatrix::identity(p))?;
        Ok(AugmentedMatrix { matrix, n, p })
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// `[e(k+1); v(k+1)]` from `[e(k); v(k)]`.
    pub fn apply(&self, e: &[f64], v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut z = e.to_vec();
        z.extend_from_slice(v);
        let mut out = self.matrix.mul_vec(&z);
        let v_next = out.split_off(self.n);
        (out, v_next)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub margin: f64,
    pub spectral_radius: f64,
    pub schur_stable: bool,
    pub augmented_spectrum: Vec<Complex64>,
    pub closed_loop_spectrum: Vec<Complex64>,
    pub phi_spectrum: Vec<Complex64>,
    /// Bottleneck distance between `σ(augmented)` and `σ(A+KC) ⊎ σ(Φ)`.
    pub pairing_distance: f64,
    /// `‖M⁻¹·Aug·M − [[A+KC, 0], [−C, Φ]]‖∞` with `M = [[I, X], [0, I]]`.
    pub similarity_residual: f64,
    pub similarity_scale: f64,
    /// `‖I_p − C·X − Φ‖∞`.
    pub integral_identity_residual: f64,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }
}

/// Re-derives every property of a design from its gains. Failures are
/// reported as check verdicts; only incoherent dimensions are errors.
pub fn verify_design(observer: &PiObserver, margin: f64) -> Result<VerificationReport> {
    let sys = &observer.system;
    let (a, c) = (sys.a(), sys.c());
    let (n, p) = (sys.n(), sys.p());
    for (name, mat, shape) in [
        ("K", &observer.k, (n, p)),
        ("X", &observer.x, (n, p)),
        ("Φ", &observer.phi, (p, p)),
    ] {
        if mat.shape() != shape {
            return Err(Error::dim(
                name,
                format!("{}x{}", shape.0, shape.1),
                format!("{}x{}", mat.rows(), mat.cols()),
            ));
        }
    }
    let aug = observer.augmented()?;
    let aug_spec = eigenvalues(aug.matrix())?;
    let closed = a.try_add(&observer.k.matmul(c)?)?;
    let cl_spec = eigenvalues(&closed)?;
    let phi_spec = eigenvalues(&observer.phi)?;
    let split = cl_spec.union(&phi_spec);
    let pairing = pairing_distance(aug_spec.values(), split.values()).unwrap_or(f64::INFINITY);

    // M⁻¹·Aug·M with M = [[I, X], [0, I]], M⁻¹ = [[I, −X], [0, I]].
    let x = &observer.x;
    let ip = RealMatrix::identity(p);
    let m = RealMatrix::from_blocks(&RealMatrix::identity(n), x, &RealMatrix::zeros(p, n), &ip)?;
    let m_inv = RealMatrix::from_blocks(&RealMatrix::identity(n), &-x, &RealMatrix::zeros(p, n), &ip)?;
    let transformed = &(&m_inv * aug.matrix()) * &m;
    let target = RealMatrix::from_blocks(&closed, &RealMatrix::zeros(n, p), &-c, &observer.phi)?;
    let similarity_residual = (&transformed - &target).norm_inf();
    let similarity_scale = aug.matrix().norm_inf().max(1.0) * (1.0 + x.norm_inf()).powi(2);

    let integral_identity_residual = (&(&ip - &(c * x)) - &observer.phi).norm_inf();
    let radius = aug_spec.radius();

    let checks = vec![
        Check {
            name: "schur_stability",
            passed: radius < 1.0 - margin,
            value: radius,
            threshold: 1.0 - margin,
        },
        Check {
            name: "spectrum_split",
            passed: pairing <= SPECTRUM_SPLIT_TOL,
            value: pairing,
            threshold: SPECTRUM_SPLIT_TOL,
        },
        Check {
            name: "similarity",
            passed: similarity_residual <= SIMILARITY_TOL * similarity_scale,
            value: similarity_residual,
            threshold: SIMILARITY_TOL * similarity_scale,
        },
        Check {
            name: "integral_identity",
            passed: integral_identity_residual <= INTEGRAL_IDENTITY_TOL,
            value: integral_identity_residual,
            threshold: INTEGRAL_IDENTITY_TOL,
        },
    ];

    Ok(VerificationReport {
        margin,
        spectral_radius: radius,
        schur_stable: radius < 1.0 - margin,
        augmented_spectrum: aug_spec.sorted(),
        closed_loop_spectrum: cl_spec.sorted(),
        phi_spectrum: phi_spec.sorted(),
        pairing_distance: pairing,
        similarity_residual,
        similarity_scale,
        integral_identity_residual,
        checks,
    })
}
