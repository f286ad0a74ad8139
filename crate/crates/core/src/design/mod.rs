//! Construction of the proportional-integral observer
//!
//! ```text
//! x̂(k+1) = (A − LC)·x̂(k) + L·y(k) + B·u(k) + F·v(k)
//! v(k+1)  = v(k) + y(k) − C·x̂(k)
//! ```
//!
//! Pipeline: detectability check, stabilizing output injection `K`, basis
//! `T` with `C = [I_p, 0]·T`, auxiliary `X = T⁻¹·[I_p − Φ; Λ]`, then
//! `L = X − K` and `F = −(A − LC)·X + X·(I_p − C·X)`. With
//! `M = [[I, X], [0, I]]` the augmented error matrix is similar to
//! `[[A + KC, 0], [−C, Φ]]`, so its spectrum is `σ(A + KC) ⊎ σ(Φ)`.

mod placement;
mod robust;
mod verify;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use placement::{place_poles_observable, place_stabilizing_gain, OpenLoopMode, StabilizingGain};
pub use verify::{verify_design, AugmentedMatrix, Check, VerificationReport};

use crate::analysis::{is_schur_stable, SystemRealization};
use crate::error::{DesignStep, Error, Result};
use crate::linalg::{complete_row_basis, eigenvalues, solve_with, RealMatrix, Spectrum};
use crate::tolerances::Tolerances;

pub const DEFAULT_MARGIN: f64 = 1e-6;
pub const DEFAULT_PHI_SCALE: f64 = 0.5;
pub const DEFAULT_SEED: u64 = 0x5EED;

/// User choices for a design. `None` fields fall back to the defaults:
/// [`default_targets`] (open-loop spectrum contracted into radius 0.7,
/// weakly visible stable modes left in place), `Φ = 0.5·I_p`, `Λ = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignConfig {
    pub target_poles: Option<Vec<Complex64>>,
    pub phi: Option<RealMatrix>,
    pub lambda: Option<RealMatrix>,
    pub margin: f64,
    pub tolerances: Tolerances,
    pub seed: u64,
}

impl Default for DesignConfig {
    fn default() -> Self {
        DesignConfig {
            target_poles: None,
            phi: None,
            lambda: None,
            margin: DEFAULT_MARGIN,
            tolerances: Tolerances::default(),
            seed: DEFAULT_SEED,
        }
    }
}

impl DesignConfig {
    pub fn with_poles(mut self, poles: Vec<Complex64>) -> Self {
        self.target_poles = Some(poles);
        self
    }

    pub fn with_phi(mut self, phi: RealMatrix) -> Self {
        self.phi = Some(phi);
        self
    }

    pub fn with_lambda(mut self, lambda: RealMatrix) -> Self {
        self.lambda = Some(lambda);
        self
    }

    fn resolve_phi(&self, p: usize) -> Result<RealMatrix> {
        let phi = self.phi.clone().unwrap_or_else(|| RealMatrix::scalar(p, DEFAULT_PHI_SCALE));
        if phi.shape() != (p, p) {
            return Err(Error::InvalidConfig(format!(
                "Φ must be {p}x{p}, got {}x{}",
                phi.rows(),
                phi.cols()
            )));
        }
        if phi.max_abs() == 0.0 {
            return Err(Error::InvalidConfig("Φ must be nonzero".into()));
        }
        let v = is_schur_stable(&phi, 0.0)?;
        if !v.stable {
            return Err(Error::InvalidConfig(format!(
                "Φ must be Schur stable (spectral radius {})",
                v.radius
            )));
        }
        Ok(phi)
    }

    fn resolve_lambda(&self, n: usize, p: usize) -> Result<RealMatrix> {
        match &self.lambda {
            None => Ok(RealMatrix::zeros(n - p, p)),
            // An empty document `[]` stands for the 0×p block.
            Some(l) if n == p && l.is_empty() => Ok(RealMatrix::zeros(0, p)),
            Some(l) if l.shape() == (n - p, p) => Ok(l.clone()),
            Some(l) => Err(Error::InvalidConfig(format!(
                "Λ must be {}x{p}, got {}x{}",
                n - p,
                l.rows(),
                l.cols()
            ))),
        }
    }

    fn resolve_targets(&self, observable: &[OpenLoopMode], avoid: &[Complex64]) -> Result<Vec<Complex64>> {
        let count = observable.len();
        match &self.target_poles {
            Some(poles) => {
                if poles.len() != count {
                    return Err(Error::InvalidConfig(format!(
                        "expected {count} target poles (dimension of the observable block), got {}",
                        poles.len()
                    )));
                }
                if let Some(bad) = poles.iter().find(|z| !(z.norm() < 1.0)) {
                    return Err(Error::InvalidConfig(format!("target pole {bad} is not inside the unit disk")));
                }
                if !Spectrum::new(poles.clone()).is_conjugate_closed(self.tolerances.eig) {
                    return Err(Error::InvalidConfig("target poles are not closed under conjugation".into()));
                }
                Ok(poles.clone())
            }
            None => Ok(default_targets(observable, avoid)),
        }
    }
}

/// Radius the default targets contract the open-loop spectrum to.
pub const DEFAULT_TARGET_RADIUS: f64 = 0.7;

/// Visibility below which a stable, isolated mode is left where it is.
pub const WEAK_VISIBILITY: f64 = 1e-2;

/// Largest magnitude of a weakly visible mode that is left in place.
pub const KEEP_RADIUS: f64 = 0.95;

/// Default target poles for an observable block with open-loop modes
/// `open_loop`.
///
/// A mode the output barely sees ([`OpenLoopMode::visibility`] below
/// [`WEAK_VISIBILITY`]) that is already inside [`KEEP_RADIUS`], isolated
/// from the other modes and clear of `avoid` keeps its eigenvalue: moving
/// it would take a gain of order shift/visibility. The remaining modes are
/// scaled by `α = min(1, 0.7/ρ)`; radial contraction keeps every pole close
/// to where it already is. `α` shrinks further until every moved target is
/// at least 0.01 from `avoid` and from the kept poles; if that never happens
/// the moved poles become the roots of `z^k = −r^k` (`r` near 0.4).
pub fn default_targets(open_loop: &[OpenLoopMode], avoid: &[Complex64]) -> Vec<Complex64> {
    let isolated = |i: usize| {
        let z = open_loop[i].pole;
        open_loop.iter().enumerate().all(|(j, m)| {
            j == i || (m.pole - z).norm() >= AVOID_SEPARATION || (z.im != 0.0 && m.pole == z.conj())
        }) && (z.im == 0.0 || z.im.abs() >= AVOID_SEPARATION / 2.0)
    };
    let keep: Vec<bool> = (0..open_loop.len())
        .map(|i| {
            let m = &open_loop[i];
            m.visibility < WEAK_VISIBILITY && m.pole.norm() <= KEEP_RADIUS && isolated(i) && clear_of(&[m.pole], avoid)
        })
        .collect();
    let kept: Vec<Complex64> = open_loop.iter().zip(&keep).filter(|(_, &k)| k).map(|(m, _)| m.pole).collect();
    let moved: Vec<Complex64> = open_loop.iter().zip(&keep).filter(|(_, &k)| !k).map(|(m, _)| m.pole).collect();
    let mut blocked = avoid.to_vec();
    blocked.extend_from_slice(&kept);

    let radius = moved.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut alpha = if radius > DEFAULT_TARGET_RADIUS { DEFAULT_TARGET_RADIUS / radius } else { 1.0 };
    for _ in 0..60 {
        let pts: Vec<Complex64> = moved.iter().map(|z| z * alpha).collect();
        if clear_of(&pts, &blocked) {
            return [pts, kept].concat();
        }
        alpha *= 0.95;
    }
    [ring_targets(moved.len(), &blocked), kept].concat()
}

const AVOID_SEPARATION: f64 = 0.01;

fn clear_of(pts: &[Complex64], avoid: &[Complex64]) -> bool {
    pts.iter().all(|p| avoid.iter().all(|z| (z - p).norm() >= AVOID_SEPARATION))
}

/// `count` poles spread evenly on a circle of radius near 0.4, moved until
/// they clear `avoid`.
fn ring_targets(count: usize, avoid: &[Complex64]) -> Vec<Complex64> {
    const NUDGE: f64 = 0.0137;
    if count == 0 {
        return Vec::new();
    }
    let ring = |r: f64| {
        let mut pts = Vec::with_capacity(count);
        for j in 0..count / 2 {
            let z = Complex64::from_polar(r, std::f64::consts::PI * (2 * j + 1) as f64 / count as f64);
            pts.push(z);
            pts.push(z.conj());
        }
        if count % 2 == 1 {
            pts.push(Complex64::new(-r, 0.0));
        }
        pts
    };
    for step in 0..200 {
        let r = 0.4 + if step % 2 == 0 { -1.0 } else { 1.0 } * NUDGE * ((step + 1) / 2) as f64;
        let pts = ring(r);
        if (0.05..=0.9).contains(&r) && clear_of(&pts, avoid) {
            return pts;
        }
    }
    ring(0.4)
}

/// Designed observer gains together with the intermediates that witness
/// the construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PiObserver {
    pub system: SystemRealization,
    /// Proportional gain, `n × p`.
    pub l: RealMatrix,
    /// Integral gain, `n × p`.
    pub f: RealMatrix,
    /// Stabilizing output injection, `A + K·C` Schur stable.
    pub k: RealMatrix,
    /// Basis with `C = [I_p, 0]·T`.
    pub t: RealMatrix,
    pub x: RealMatrix,
    pub phi: RealMatrix,
    pub lambda: RealMatrix,
    /// Poles assigned to the observable part of `A + K·C`.
    pub assigned_poles: Vec<Complex64>,
    /// Unobservable eigenvalues of `A`, kept in `σ(A + K·C)`.
    pub inherited_poles: Vec<Complex64>,
}

impl PiObserver {
    pub fn n(&self) -> usize {
        self.system.n()
    }

    pub fn p(&self) -> usize {
        self.system.p()
    }

    /// `[[A − LC, F], [−C, I_p]]`.
    pub fn augmented(&self) -> Result<AugmentedMatrix> {
        AugmentedMatrix::assemble(self.system.a(), self.system.c(), &self.l, &self.f)
    }

    /// `A + K·C`.
    pub fn closed_loop(&self) -> RealMatrix {
        self.system.a() + &(&self.k * self.system.c())
    }
}

/// `X = T⁻¹·[I_p − Φ; Λ]`.
pub fn build_x(t: &RealMatrix, phi: &RealMatrix, lambda: &RealMatrix, tol_sing: f64) -> Result<RealMatrix> {
    let n = t.rows();
    let p = phi.rows();
    if !t.is_square() || !phi.is_square() || p > n {
        return Err(Error::dim(
            "auxiliary matrix",
            "T n×n, Φ p×p with p ≤ n",
            format!("T {:?}, Φ {:?}", t.shape(), phi.shape()),
        ));
    }
    if lambda.rows() != n - p || (lambda.rows() > 0 && lambda.cols() != p) {
        return Err(Error::dim("Λ", format!("{}x{p}", n - p), format!("{}x{}", lambda.rows(), lambda.cols())));
    }
    let top = &RealMatrix::identity(p) - phi;
    let rhs = RealMatrix::vstack(&top, lambda)?;
    solve_with(t, &rhs, tol_sing)
}

/// Runs the full construction. Errors carry the step that failed;
/// infeasibility (non-detectable pair) is reported with its witness.
pub fn design_pi_observer(system: &SystemRealization, config: &DesignConfig) -> Result<PiObserver> {
    let tol = &config.tolerances;
    let (a, c) = (system.a(), system.c());
    let (n, p) = (system.n(), system.p());
    if !(config.margin >= 0.0 && config.margin < 1.0) {
        return Err(Error::InvalidConfig(format!("margin must lie in [0, 1), got {}", config.margin)));
    }
    let phi = config.resolve_phi(p)?;
    let lambda = config.resolve_lambda(n, p)?;
    let phi_spec = eigenvalues(&phi)?;

    let det = crate::analysis::is_detectable(a, c, tol).map_err(|e| e.at(DesignStep::Detectability))?;
    if !det.detectable {
        return Err(Error::Infeasible { witness: det.witness });
    }

    let gain = place_stabilizing_gain(
        a,
        c,
        |observable, inherited| {
            let mut avoid = inherited.to_vec();
            avoid.extend_from_slice(phi_spec.values());
            config.resolve_targets(observable, &avoid)
        },
        config.margin,
        tol,
        config.seed,
    )
    .map_err(|e| e.at(DesignStep::StabilizingGain))?;

    let t = complete_row_basis(c, tol.rank).map_err(|e| e.at(DesignStep::Basis))?;
    let x = build_x(&t, &phi, &lambda, tol.singular).map_err(|e| e.at(DesignStep::Auxiliary))?;

    let l = &x - &gain.k;
    let integral = &RealMatrix::identity(p) - &(c * &x);
    let a_lc = a - &(&l * c);
    let f = &(&x * &integral) - &(&a_lc * &x);
    if !l.is_finite() || !f.is_finite() {
        return Err(Error::NonFinite("observer gains".into()).at(DesignStep::Gains));
    }

    let observer = PiObserver {
        system: system.clone(),
        l,
        f,
        k: gain.k,
        t,
        x,
        phi,
        lambda,
        assigned_poles: gain.assigned,
        inherited_poles: gain.inherited,
    };
    let aug = observer.augmented().map_err(|e| e.at(DesignStep::Verification))?;
    let v = is_schur_stable(aug.matrix(), config.margin).map_err(|e| e.at(DesignStep::Verification))?;
    if !v.stable {
        return Err(Error::NotSchurStable {
            what: "augmented error matrix".into(),
            radius: v.radius,
        }
        .at(DesignStep::Verification));
    }
    Ok(observer)
}
