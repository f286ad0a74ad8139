//! Command-line front end.
//!
//! Exit status: 0 success, 2 infeasible (not detectable), 3 input or parse
//! error, 4 numerical failure (including a failed verification).

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::analyze;
use crate::design::{design_pi_observer, verify_design, DesignConfig, DEFAULT_MARGIN, DEFAULT_SEED};
use crate::error::{Error, Result};
use crate::io::{self, DesignReport};
use crate::linalg::RealMatrix;
use crate::sim::{run_simulation, InputSignal, SimulationConfig};
use crate::tolerances::Tolerances;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "piobs", version, about = "Proportional-integral observer design for discrete-time LTI systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify eigenvalues and report detectability and observability.
    Analyze {
        system: PathBuf,
        #[command(flatten)]
        tol: TolFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Design L and F and write a design report.
    Design {
        system: PathBuf,
        #[command(flatten)]
        design: DesignFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate plant and observer from a saved design report; writes CSV.
    Simulate {
        system: PathBuf,
        report: PathBuf,
        #[command(flatten)]
        sim: SimFlags,
        #[command(flatten)]
        tol: TolFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-derive every check of a saved design report.
    Verify {
        system: PathBuf,
        report: PathBuf,
        /// Defaults to the margin recorded in the report.
        #[arg(long)]
        margin: Option<f64>,
        #[command(flatten)]
        tol: TolFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Design every system file in parallel, one report per file.
    Batch {
        #[arg(required = true)]
        systems: Vec<PathBuf>,
        #[command(flatten)]
        design: DesignFlags,
        /// Directory receiving `<stem>.report.json` per input.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Summary document destination (stdout by default).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct TolFlags {
    #[arg(long, default_value_t = Tolerances::default().rank)]
    pub tol_rank: f64,
    #[arg(long, default_value_t = Tolerances::default().eig)]
    pub tol_eig: f64,
}

impl TolFlags {
    fn tolerances(&self) -> Result<Tolerances> {
        for (name, v) in [("--tol-rank", self.tol_rank), ("--tol-eig", self.tol_eig)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Tolerances {
            rank: self.tol_rank,
            eig: self.tol_eig,
            ..Tolerances::default()
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct DesignFlags {
    /// Target pole for the observable part of A + KC, e.g. `0.2` or
    /// `0.1+0.3i`. Repeat once per pole.
    #[arg(long = "pole", allow_hyphen_values = true)]
    pub poles: Vec<String>,
    /// Φ = s·I_p.
    #[arg(long, visible_alias = "phi", allow_hyphen_values = true, conflicts_with = "phi_file")]
    pub phi_scalar: Option<f64>,
    /// JSON matrix file for Φ.
    #[arg(long)]
    pub phi_file: Option<PathBuf>,
    /// JSON matrix file for Λ, `(n − p) × p`.
    #[arg(long)]
    pub lambda_file: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MARGIN)]
    pub margin: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub tol: TolFlags,
}

impl DesignFlags {
    pub fn config(&self, p: usize) -> Result<DesignConfig> {
        let mut cfg = DesignConfig {
            margin: self.margin,
            seed: self.seed,
            tolerances: self.tol.tolerances()?,
            ..DesignConfig::default()
        };
        if !self.poles.is_empty() {
            let poles = self.poles.iter().map(|s| io::parse_complex(s)).collect::<Result<Vec<Complex64>>>()?;
            cfg.target_poles = Some(poles);
        }
        if let Some(s) = self.phi_scalar {
            cfg.phi = Some(RealMatrix::scalar(p, s));
        }
        if let Some(path) = &self.phi_file {
            cfg.phi = Some(io::load_matrix(path)?);
        }
        if let Some(path) = &self.lambda_file {
            cfg.lambda = Some(io::load_matrix(path)?);
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputKind {
    Zero,
    Constant,
    Step,
    Random,
}

#[derive(Debug, Clone, Args)]
pub struct SimFlags {
    #[arg(long, default_value_t = 200)]
    pub horizon: usize,
    /// Plant initial state, comma separated (default all ones).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x0: Option<Vec<f64>>,
    /// Observer initial state (default zero).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub xhat0: Option<Vec<f64>>,
    /// Integral state (default zero).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub v0: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = InputKind::Zero)]
    pub input: InputKind,
    /// Input level for `constant` and `step` (default all ones).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub input_value: Option<Vec<f64>>,
    /// Bound on `random` input samples.
    #[arg(long, default_value_t = 1.0)]
    pub input_amplitude: f64,
    #[arg(long, default_value_t = 10)]
    pub step_onset: usize,
    /// Seed for the `random` input.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    pub convergence_tol: f64,
}

impl SimFlags {
    pub fn config(&self, n: usize, m: usize, p: usize) -> SimulationConfig {
        let value = || self.input_value.clone().unwrap_or_else(|| vec![1.0; m]);
        let input = match self.input {
            InputKind::Zero => InputSignal::Zero,
            InputKind::Constant => InputSignal::Constant { value: value() },
            InputKind::Step => InputSignal::Step {
                value: value(),
                onset: self.step_onset,
            },
            InputKind::Random => InputSignal::Random {
                amplitude: self.input_amplitude,
                seed: self.seed,
            },
        };
        SimulationConfig {
            horizon: self.horizon,
            x0: self.x0.clone().unwrap_or_else(|| vec![1.0; n]),
            xhat0: self.xhat0.clone().unwrap_or_else(|| vec![0.0; n]),
            v0: self.v0.clone().unwrap_or_else(|| vec![0.0; p]),
            input,
            convergence_tol: self.convergence_tol,
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display()))),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

/// Design outcome for one system: the report to write and its exit status.
fn design_report(system_path: &Path, flags: &DesignFlags) -> Result<(DesignReport, i32)> {
    let system = io::load_system(system_path, flags.tol.tolerances()?.rank)?;
    let cfg = flags.config(system.p())?;
    match design_pi_observer(&system, &cfg) {
        Ok(obs) => {
            let ver = verify_design(&obs, cfg.margin)?;
            let code = if ver.passed() { EXIT_OK } else { EXIT_NUMERICAL };
            Ok((DesignReport::feasible(&obs, &cfg, &ver)?, code))
        }
        Err(Error::Infeasible { witness }) => Ok((DesignReport::infeasible(&system, &cfg, witness), EXIT_INFEASIBLE)),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Serialize)]
struct BatchEntry {
    file: String,
    exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict: Option<io::Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    spectral_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn batch_one(path: &Path, flags: &DesignFlags, out_dir: Option<&Path>) -> BatchEntry {
    let mut entry = BatchEntry {
        file: path.display().to_string(),
        exit_code: EXIT_OK,
        verdict: None,
        spectral_radius: None,
        report: None,
        error: None,
    };
    let outcome = std::panic::catch_unwind(|| -> Result<(DesignReport, i32, Option<String>)> {
        let (report, code) = design_report(path, flags)?;
        let written = match out_dir {
            Some(dir) => {
                let stem = path.file_stem().map_or("system".into(), |s| s.to_string_lossy().into_owned());
                let dest = dir.join(format!("{stem}.report.json"));
                emit(Some(&dest), &io::to_json(&report)?)?;
                Some(dest.display().to_string())
            }
            None => None,
        };
        Ok((report, code, written))
    });
    match outcome {
        Ok(Ok((report, code, written))) => {
            entry.exit_code = code;
            entry.verdict = Some(report.verdict);
            entry.spectral_radius = report.residuals.as_ref().map(|r| r.spectral_radius);
            entry.report = written;
        }
        Ok(Err(e)) => {
            entry.exit_code = e.exit_code();
            entry.error = Some(e.to_string());
        }
        Err(_) => {
            entry.exit_code = EXIT_NUMERICAL;
            entry.error = Some("internal failure while processing this file".into());
        }
    }
    entry
}

fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Analyze { system, tol, out } => {
            let tol = tol.tolerances()?;
            let sys = io::load_system(&system, tol.rank)?;
            let report = analyze(&sys, &tol)?;
            emit(out.as_deref(), &io::to_json(&report)?)?;
            Ok(EXIT_OK)
        }
        Command::Design { system, design, out } => {
            let (report, code) = design_report(&system, &design)?;
            emit(out.as_deref(), &io::to_json(&report)?)?;
            if code == EXIT_INFEASIBLE {
                eprintln!(
                    "error: {}",
                    Error::Infeasible {
                        witness: report.witness.clone()
                    }
                );
            } else if code != EXIT_OK {
                eprintln!("error: design failed verification");
            }
            Ok(code)
        }
        Command::Simulate {
            system,
            report,
            sim,
            tol,
            out,
        } => {
            let sys = io::load_system(&system, tol.tolerances()?.rank)?;
            let obs = DesignReport::load(&report)?.observer(&sys)?;
            let cfg = sim.config(sys.n(), sys.m(), sys.p());
            let trace = run_simulation(&obs, &cfg)?;
            emit(out.as_deref(), &io::trace_to_csv(&trace)?)?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            system,
            report,
            margin,
            tol,
            out,
        } => {
            let sys = io::load_system(&system, tol.tolerances()?.rank)?;
            let doc = DesignReport::load(&report)?;
            let obs = doc.observer(&sys)?;
            let ver = verify_design(&obs, margin.unwrap_or(doc.config.margin))?;
            emit(out.as_deref(), &io::to_json(&ver)?)?;
            if ver.passed() {
                Ok(EXIT_OK)
            } else {
                eprintln!("error: verification failed: {}", ver.failed_checks().join(", "));
                Ok(EXIT_NUMERICAL)
            }
        }
        Command::Batch {
            systems,
            design,
            out_dir,
            out,
        } => {
            if let Some(dir) = &out_dir {
                std::fs::create_dir_all(dir)?;
            }
            let entries: Vec<BatchEntry> = systems
                .par_iter()
                .map(|p| batch_one(p, &design, out_dir.as_deref()))
                .collect();
            emit(out.as_deref(), &io::to_json(&entries)?)?;
            Ok(entries.iter().map(|e| e.exit_code).max().unwrap_or(EXIT_OK))
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
