use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by analysis and design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative singular-value threshold for every rank decision.
    pub rank: f64,
    /// Pairing tolerance for conjugate closure of eigenvalue multisets.
    pub eig: f64,
    /// Eigenvalues with `|λ| ≥ 1 − boundary` count as unstable.
    pub boundary: f64,
    /// Eigenvalues closer than this (relative) share one PBH evaluation.
    pub cluster: f64,
    /// Smallest acceptable reciprocal condition number in linear solves.
    pub singular: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank: 1e-9,
            eig: 1e-9,
            boundary: 1e-9,
            cluster: 1e-7,
            singular: crate::linalg::DEFAULT_TOL_SING,
        }
    }
}
