//! Dense real-matrix numerics: eigenvalues, rank, characteristic
//! polynomials, linear solves and basis completion.

mod basis;
mod eigen;
mod matrix;
mod poly;
mod solve;
mod spectrum;
mod svd;

pub use basis::complete_row_basis;
pub use eigen::{eigenvalues, hessenberg, spectral_radius};
pub use matrix::RealMatrix;
pub use poly::{char_poly, poly_eval, relative_coeff_error};
pub use solve::{determinant, rcond, solve, solve_with, Lu, DEFAULT_TOL_SING};
pub use spectrum::{pairing_distance, poly_from_roots, Spectrum};
pub use svd::{complex_numerical_rank, complex_singular_values, numerical_rank, singular_values, svd, Svd};

/// Complex scalar used for eigenvalues and evaluation points.
pub type ComplexScalar = num_complex::Complex64;

/// Default relative rank threshold.
pub const DEFAULT_TOL_RANK: f64 = 1e-9;
