use num_complex::Complex64;
use thiserror::Error;

/// Stage of the observer construction pipeline, used to tag numerical failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignStep {
    Detectability,
    StabilizingGain,
    Basis,
    Auxiliary,
    Gains,
    Verification,
}

impl std::fmt::Display for DesignStep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            DesignStep::Detectability => "detectability check",
            DesignStep::StabilizingGain => "stabilizing gain",
            DesignStep::Basis => "basis completion",
            DesignStep::Auxiliary => "auxiliary matrix X",
            DesignStep::Gains => "observer gains",
            DesignStep::Verification => "closed-loop verification",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension {
        context: String,
        expected: String,
        found: String,
    },

    #[error("non-finite entry in {0}")]
    NonFinite(String),

    #[error("matrix is singular or nearly singular (reciprocal condition {rcond:.3e})")]
    Singular { rcond: f64 },

    #[error("rank deficiency in {context}: rank {rank}, expected {expected}")]
    RankDeficient {
        context: String,
        rank: usize,
        expected: usize,
    },

    #[error("{0} did not converge")]
    NoConvergence(String),

    #[error("pair (A, C) is not detectable; unstable unobservable eigenvalues: {}", fmt_witness(.witness))]
    Infeasible { witness: Vec<Complex64> },

    #[error("pair (A, C) is not observable")]
    Unobservable,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{step} failed: {source}")]
    Design {
        step: DesignStep,
        #[source]
        source: Box<Error>,
    },

    #[error("{what} is not Schur stable (spectral radius {radius:.6e})")]
    NotSchurStable { what: String, radius: f64 },

    #[error("simulation diverged at step {step}: state norm {norm:.3e}")]
    Diverged { step: usize, norm: f64 },

    #[error("{0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

fn fmt_witness(w: &[Complex64]) -> String {
    let parts: Vec<String> = w.iter().map(|z| crate::io::format_complex(*z)).collect();
    format!("{{{}}}", parts.join(", "))
}

impl Error {
    pub(crate) fn dim(context: impl Into<String>, expected: impl ToString, found: impl ToString) -> Self {
        Error::Dimension {
            context: context.into(),
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }

    pub(crate) fn at(self, step: DesignStep) -> Self {
        match self {
            e @ (Error::Infeasible { .. } | Error::Design { .. } | Error::InvalidConfig(_)) => e,
            e => Error::Design {
                step,
                source: Box::new(e),
            },
        }
    }

    /// Process exit status for this error: 2 infeasible, 3 input, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Infeasible { .. } => 2,
            Error::Dimension { .. }
            | Error::NonFinite(_)
            | Error::RankDeficient { .. }
            | Error::InvalidConfig(_)
            | Error::Parse(_)
            | Error::Io(_) => 3,
            Error::Singular { .. }
            | Error::NoConvergence(_)
            | Error::Unobservable
            | Error::NotSchurStable { .. }
            | Error::Diverged { .. } => 4,
            Error::Design { source, .. } => match source.exit_code() {
                3 => 3,
                2 => 2,
                _ => 4,
            },
        }
    }
}
