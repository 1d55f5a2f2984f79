//! Scattering data, Littlewood-Paley kernels and Besov norms for `H = -∂² + V` on the line.

pub mod besov;
pub mod cli;
pub mod config;
pub mod counterexample;
pub mod error;
pub mod estimates;
pub mod fit;
pub mod grid;
pub mod gronwall;
pub mod io;
pub mod jost;
pub mod kernels;
pub mod oracle;
pub mod potential;
pub mod scattering;
pub mod suite;
pub mod window;

pub use error::{Error, Result};
pub use grid::{FrequencyGrid, SpatialGrid};
pub use jost::{JostColumn, JostField, JostSolver, Side, SolverOptions};
pub use num_complex::Complex64 as C64;
pub use potential::{Potential, PotentialKind};
