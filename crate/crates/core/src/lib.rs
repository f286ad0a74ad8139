//! Full-order proportional-integral observers for discrete-time linear
//! time-invariant systems.
//!
//! The crate checks whether an observer exists for a plant `(A, B, C)`
//! (detectability of `(A, C)`), constructs the proportional gain `L` and the
//! integral gain `F`, verifies the resulting error dynamics, and simulates
//! plant and observer side by side.

// `!(x < t)` rejects NaN along with out-of-range values; index loops mirror
// the matrix algebra.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod cli;
pub mod design;
pub mod error;
pub mod io;
pub mod linalg;
pub mod sim;
pub mod tolerances;

pub use analysis::{AnalysisReport, SystemRealization};
pub use design::{design_pi_observer, verify_design, DesignConfig, PiObserver, VerificationReport};
pub use error::{Error, Result};
pub use linalg::{ComplexScalar, RealMatrix, Spectrum};
pub use sim::{run_simulation, InputSignal, SimulationConfig, SimulationTrace};
pub use tolerances::Tolerances;
