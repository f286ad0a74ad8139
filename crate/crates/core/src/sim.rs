//! Co-simulation of the plant and the PI observer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::SystemRealization;
use crate::design::PiObserver;
use crate::error::{Error, Result};

/// Plant state norm above which a run is aborted.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputSignal {
    Zero,
    Constant { value: Vec<f64> },
    /// Zero before `onset`, `value` from `onset` on.
    Step { value: Vec<f64>, onset: usize },
    /// Independent uniform samples in `[-amplitude, amplitude]`.
    Random { amplitude: f64, seed: u64 },
}

impl InputSignal {
    fn check(&self, m: usize) -> Result<()> {
        match self {
            InputSignal::Constant { value } | InputSignal::Step { value, .. } if value.len() != m => {
                Err(Error::dim("input signal", format!("{m} entries"), value.len()))
            }
            InputSignal::Random { amplitude, .. } if !(amplitude.is_finite() && *amplitude >= 0.0) => {
                Err(Error::InvalidConfig(format!("input amplitude must be finite and >= 0, got {amplitude}")))
            }
            _ => Ok(()),
        }
    }

    /// Materializes `u(0..len)`.
    pub fn samples(&self, m: usize, len: usize) -> Vec<Vec<f64>> {
        match self {
            InputSignal::Zero => vec![vec![0.0; m]; len],
            InputSignal::Constant { value } => vec![value.clone(); len],
            InputSignal::Step { value, onset } => (0..len)
                .map(|k| if k >= *onset { value.clone() } else { vec![0.0; m] })
                .collect(),
            InputSignal::Random { amplitude, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                (0..len)
                    .map(|_| {
                        (0..m)
                            .map(|_| if *amplitude > 0.0 { rng.random_range(-amplitude..=*amplitude) } else { 0.0 })
                            .collect()
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    /// Number of transitions; the trace holds `horizon + 1` samples.
    pub horizon: usize,
    pub x0: Vec<f64>,
    pub xhat0: Vec<f64>,
    pub v0: Vec<f64>,
    pub input: InputSignal,
    pub convergence_tol: f64,
}

impl SimulationConfig {
    /// Zero input, zero observer state, `x0` as given.
    pub fn from_initial_state(x0: Vec<f64>, p: usize, horizon: usize) -> Self {
        let n = x0.len();
        SimulationConfig {
            horizon,
            x0,
            xhat0: vec![0.0; n],
            v0: vec![0.0; p],
            input: InputSignal::Zero,
            convergence_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceStep {
    pub k: usize,
    pub x: Vec<f64>,
    pub xhat: Vec<f64>,
    pub y: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub e: Vec<f64>,
    pub err_inf: f64,
    pub v_inf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationTrace {
    pub steps: Vec<TraceStep>,
    pub convergence_tol: f64,
    /// First `k` with `max(‖e(k)‖∞, ‖v(k)‖∞) ≤ convergence_tol`.
    pub converged_at: Option<usize>,
    /// Whether every later sample also stays within the tolerance.
    pub stays_converged: bool,
}

impl SimulationTrace {
    pub fn err_inf(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.err_inf).collect()
    }

    /// `max(‖e(k)‖∞, ‖v(k)‖∞)` per step.
    pub fn joint_error(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.err_inf.max(s.v_inf)).collect()
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn axpy_into(out: &mut [f64], y: &[f64]) {
    out.iter_mut().zip(y).for_each(|(o, y)| *o += y);
}

/// `(A·x + B·u, C·x)`.
pub fn step_plant(system: &SystemRealization, x: &[f64], u: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if x.len() != system.n() {
        return Err(Error::dim("plant state", system.n(), x.len()));
    }
    if u.len() != system.m() {
        return Err(Error::dim("plant input", system.m(), u.len()));
    }
    let mut next = system.a().mul_vec(x);
    axpy_into(&mut next, &system.b().mul_vec(u));
    Ok((next, system.c().mul_vec(x)))
}

/// One observer update:
/// `x̂⁺ = (A − LC)·x̂ + L·y + B·u + F·v`, `v⁺ = v + y − C·x̂`.
pub fn step_observer(
    system: &SystemRealization,
    observer: &PiObserver,
    xhat: &[f64],
    v: &[f64],
    y: &[f64],
    u: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (n, m, p) = (system.n(), system.m(), system.p());
    for (what, got, want) in [("observer state", xhat.len(), n), ("integral state", v.len(), p), ("output", y.len(), p), ("input", u.len(), m)] {
        if got != want {
            return Err(Error::dim(what, want, got));
        }
    }
    if observer.l.shape() != (n, p) || observer.f.shape() != (n, p) {
        return Err(Error::dim("observer gains", format!("{n}x{p}"), format!("{:?}/{:?}", observer.l.shape(), observer.f.shape())));
    }
    // Evaluated as A·x̂ + L·(y − C·x̂) + B·u + F·v so that x̂ = x, v = 0
    // reproduces the plant update bit for bit.
    let c_xhat = system.c().mul_vec(xhat);
    let innovation: Vec<f64> = y.iter().zip(&c_xhat).map(|(a, b)| a - b).collect();
    let mut next = system.a().mul_vec(xhat);
    axpy_into(&mut next, &observer.l.mul_vec(&innovation));
    axpy_into(&mut next, &system.b().mul_vec(u));
    axpy_into(&mut next, &observer.f.mul_vec(v));
    let v_next: Vec<f64> = (0..p).map(|i| v[i] + innovation[i]).collect();
    Ok((next, v_next))
}

pub fn run_simulation(observer: &PiObserver, config: &SimulationConfig) -> Result<SimulationTrace> {
    let system = &observer.system;
    let (n, m, p) = (system.n(), system.m(), system.p());
    if config.horizon == 0 {
        return Err(Error::InvalidConfig("horizon must be at least 1".into()));
    }
    if !(config.convergence_tol > 0.0) {
        return Err(Error::InvalidConfig("convergence tolerance must be positive".into()));
    }
    for (what, got, want) in [("x0", config.x0.len(), n), ("xhat0", config.xhat0.len(), n), ("v0", config.v0.len(), p)] {
        if got != want {
            return Err(Error::dim(what, want, got));
        }
    }
    config.input.check(m)?;
    let inputs = config.input.samples(m, config.horizon + 1);

    let mut steps = Vec::with_capacity(config.horizon + 1);
    let (mut x, mut xhat, mut v) = (config.x0.clone(), config.xhat0.clone(), config.v0.clone());
    for (k, u) in inputs.into_iter().enumerate() {
        let norm = inf_norm(&x).max(inf_norm(&xhat));
        if !(norm <= DIVERGENCE_LIMIT) {
            return Err(Error::Diverged { step: k, norm });
        }
        let (x_next, y) = step_plant(system, &x, &u)?;
        let e: Vec<f64> = xhat.iter().zip(&x).map(|(a, b)| a - b).collect();
        let (xhat_next, v_next) = step_observer(system, observer, &xhat, &v, &y, &u)?;
        steps.push(TraceStep {
            k,
            err_inf: inf_norm(&e),
            v_inf: inf_norm(&v),
            x: std::mem::replace(&mut x, x_next),
            xhat: std::mem::replace(&mut xhat, xhat_next),
            v: std::mem::replace(&mut v, v_next),
            y,
            u,
            e,
        });
    }

    let joint: Vec<f64> = steps.iter().map(|s| s.err_inf.max(s.v_inf)).collect();
    let converged_at = joint.iter().position(|&j| j <= config.convergence_tol);
    let stays_converged = converged_at.is_some_and(|k| joint[k..].iter().all(|&j| j <= config.convergence_tol));
    Ok(SimulationTrace {
        steps,
        convergence_tol: config.convergence_tol,
        converged_at,
        stays_converged,
    })
}

/// Largest `‖[e(k+1); v(k+1)] − Aug·[e(k); v(k)]‖∞` over the trace, with the
/// step `k` where it occurs.
pub fn error_dynamics_check(trace: &SimulationTrace, observer: &PiObserver) -> Result<(f64, usize)> {
    let aug = observer.augmented()?;
    let mut worst = (0.0, 0);
    for w in trace.steps.windows(2) {
        let (e_pred, v_pred) = aug.apply(&w[0].e, &w[0].v);
        let r = e_pred
            .iter()
            .zip(&w[1].e)
            .chain(v_pred.iter().zip(&w[1].v))
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if r > worst.0 {
            worst = (r, w[0].k);
        }
    }
    Ok(worst)
}

/// Geometric decay rate of `max(‖e‖∞, ‖v‖∞)` from a least-squares fit of
/// its logarithm over `k ∈ [10, 200]`, restricted to samples above
/// `floor`. `None` when fewer than five samples qualify.
pub fn fitted_decay_rate(trace: &SimulationTrace, floor: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = trace
        .joint_error()
        .iter()
        .enumerate()
        .filter(|&(k, &j)| (10..=200).contains(&k) && j > floor)
        .map(|(k, &j)| (k as f64, j.ln()))
        .collect();
    if pts.len() < 5 {
        return None;
    }
    let nf = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some((sxy / sxx).exp())
}
