//! Littlewood-Paley blocks and homogeneous Besov norms.
//!
//! The sum over `q ∈ Z` is truncated to the blocks whose annulus fits between
//! the fundamental and the Nyquist wavenumber of the grid. Norms of fields
//! supported inside [`DyadicCutoff::resolved_annulus`] carry no truncation
//! error.

mod cutoff;
mod difference;
mod norm;

pub use cutoff::{build_cutoff, chi, phi, DyadicCutoff, SUPPORT};
pub use difference::{difference_norm, equivalence_constant, kth_difference, MIN_SHIFT_SAMPLES};
pub use norm::{
    besov_from_blocks, besov_norm, block_norms, dyadic_block, lp_norm, lr_norm, BesovIndex,
};

use serde::Serialize;

/// One line of a norm report.
#[derive(Debug, Clone, Serialize)]
pub struct NormRecord {
    pub field_id: String,
    #[serde(serialize_with = "crate::report::num")]
    pub s: f64,
    #[serde(serialize_with = "crate::report::num")]
    pub p: f64,
    #[serde(serialize_with = "crate::report::num")]
    pub r: f64,
    pub q_min: i32,
    pub q_max: i32,
    #[serde(serialize_with = "crate::report::num")]
    pub value: f64,
}

impl NormRecord {
    pub fn measure(
        field_id: impl Into<String>,
        f: &crate::spectral::SpectralField,
        idx: &BesovIndex,
        cutoff: &DyadicCutoff,
    ) -> crate::Result<Self> {
        Ok(Self {
            field_id: field_id.into(),
            s: idx.s,
            p: idx.p,
            r: idx.r,
            q_min: cutoff.q_min(),
            q_max: cutoff.q_max(),
            value: besov_norm(f, idx, cutoff)?,
        })
    }
}
