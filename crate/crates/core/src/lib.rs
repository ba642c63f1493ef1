//! Pseudo-spectral laboratory for the generalised Navier-Stokes system
//!
//! ```text
//! ∂_t u + (-Δ)^α u + |u|^{m-1} u · ∇u + ∇π = f,   div u = 0,   u(0) = a
//! ```
//!
//! on a periodic box. The crate builds mild solutions by Picard iteration and
//! measures every norm the global existence argument relies on: homogeneous
//! Besov norms through a Littlewood-Paley decomposition, Lorentz norms in
//! time, and empirical constants of the product, power and smoothing
//! estimates.

pub mod error;
pub mod estimates;
pub mod besov;
pub mod lorentz;
pub mod nonlinearity;
pub mod report;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
