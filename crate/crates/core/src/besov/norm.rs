use num_complex::Complex64;

use super::cutoff::DyadicCutoff;
use crate::error::{Error, Result};
use crate::spectral::SpectralField;

/// Exponents `(s, p, r)` of `Ḃ^s_{p,r}`; `p` and `r` may be `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesovIndex {
    pub s: f64,
    pub p: f64,
    pub r: f64,
}

impl BesovIndex {
    pub fn new(s: f64, p: f64, r: f64) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::Parameter(format!("regularity must be finite, got {s}")));
        }
        if !(p >= 1.0) || !(r >= 1.0) {
            return Err(Error::Parameter(format!(
                "integrability exponents must be >= 1, got p = {p}, r = {r}"
            )));
        }
        Ok(Self { s, p, r })
    }
}

/// `ℓ^r` norm of a finite sequence; `r = ∞` is the sup.
pub fn lr_norm(values: impl IntoIterator<Item = f64>, r: f64) -> f64 {
    if r.is_infinite() {
        values.into_iter().fold(0.0, f64::max)
    } else {
        values
            .into_iter()
            .map(|v| v.powf(r))
            .sum::<f64>()
            .powf(1.0 / r)
    }
}

/// Discrete `L^p` norm of the physical field behind `f`.
///
/// `p = 2` is evaluated by Parseval, which equals the grid quadrature exactly.
pub fn lp_norm(f: &SpectralField, p: f64) -> f64 {
    if p == 2.0 {
        f.l2_norm()
    } else {
        f.to_physical().lp_norm(p)
    }
}

fn check_grid(f: &SpectralField, cutoff: &DyadicCutoff) -> Result<()> {
    if !cutoff.matches(f.grid()) {
        return Err(Error::Shape(
            "cutoff was built for a different grid".to_string(),
        ));
    }
    Ok(())
}

/// `Δ_q f`: multiplies by `φ(2^{-q}|k|)`.
pub fn dyadic_block(f: &SpectralField, q: i32, cutoff: &DyadicCutoff) -> Result<SpectralField> {
    check_grid(f, cutoff)?;
    if !cutoff.contains_block(q) {
        return Err(Error::Range(format!(
            "block {q} outside resolved range {}..={}",
            cutoff.q_min(),
            cutoff.q_max()
        )));
    }
    let grid = *f.grid();
    let npts = grid.points();
    let mut out = SpectralField::zeros(grid, f.components());
    let (lo, hi) = (
        super::cutoff::SUPPORT.0 * 2f64.powi(q),
        super::cutoff::SUPPORT.1 * 2f64.powi(q),
    );
    for (idx, mode) in grid.modes() {
        if mode.norm <= lo || mode.norm >= hi {
            continue;
        }
        let w = cutoff.weight(q, mode.norm);
        for c in 0..f.components() {
            out.coeffs_mut()[c * npts + idx] = f.coeffs()[c * npts + idx] * w;
        }
    }
    Ok(out)
}

/// `(q, ‖Δ_q f‖_{L^p})` for every resolved block.
pub fn block_norms(f: &SpectralField, p: f64, cutoff: &DyadicCutoff) -> Result<Vec<(i32, f64)>> {
    check_grid(f, cutoff)?;
    let grid = *f.grid();
    let npts = grid.points();
    let mut out = Vec::new();
    for q in cutoff.blocks() {
        let block = dyadic_block(f, q, cutoff)?;
        let norm = if p == 2.0 {
            let s: f64 = block.coeffs().iter().map(Complex64::norm_sqr).sum();
            (s * grid.volume()).sqrt()
        } else {
            lp_norm(&block, p)
        };
        debug_assert_eq!(block.coeffs().len(), f.components() * npts);
        out.push((q, norm));
    }
    Ok(out)
}

/// Combines block norms into `‖(2^{qs} b_q)‖_{ℓ^r}`.
pub fn besov_from_blocks(blocks: &[(i32, f64)], s: f64, r: f64) -> f64 {
    lr_norm(blocks.iter().map(|&(q, b)| 2f64.powf(q as f64 * s) * b), r)
}

/// Truncated homogeneous Besov norm over the blocks `cutoff` resolves.
pub fn besov_norm(f: &SpectralField, idx: &BesovIndex, cutoff: &DyadicCutoff) -> Result<f64> {
    let blocks = block_norms(f, idx.p, cutoff)?;
    Ok(besov_from_blocks(&blocks, idx.s, idx.r))
}
