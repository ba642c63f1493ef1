//! Fields on a periodic box and the Fourier multipliers acting on them.
//!
//! The box `[0, L)^n` stands in for `R^n`. Every field used in a Besov
//! computation has a zero mean, which plays the role of the homogeneous
//! (`S'_h`) condition.

mod evolution;
mod fft;
mod field;
mod grid;
pub mod io;
mod ops;

pub use evolution::evolve;
pub use field::{PhysicalField, SpectralField};
pub use grid::{Grid, Mode};
pub use ops::{
    apply_multiplier, apply_radial, divergence, fractional_laplacian, gradient, leray_project,
    semigroup_apply, RadialTable, Symbol,
};
