//! Finite-difference characterisation of `Ḃ^s_{p,r}` for `0 < s < k`.
//!
//! Used only as an independent cross-check of the dyadic norm: the two agree
//! up to constants that depend on `(s, p, r, k, n)` and on the cutoff.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::cutoff::DyadicCutoff;
use super::norm::{besov_norm, lp_norm, BesovIndex};
use crate::error::{Error, Result};
use crate::spectral::SpectralField;

pub const MIN_SHIFT_SAMPLES: usize = 100;

fn binomial(k: u32, j: u32) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (k - i) as f64 / (i + 1) as f64)
}

/// `Δ_y^k f = Σ_j (-1)^{k-j} C(k,j) f(· + j y)`, shifts applied exactly as phases.
pub fn kth_difference(f: &SpectralField, y: &[f64], k: u32) -> SpectralField {
    let grid = *f.grid();
    let npts = grid.points();
    let mut out = f.clone();
    for (idx, mode) in grid.modes() {
        let ky: f64 = (0..grid.dim()).map(|a| mode.k[a] * y[a]).sum();
        let mut m = Complex64::default();
        for j in 0..=k {
            let sign = if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
            m += Complex64::from_polar(sign * binomial(k, j), j as f64 * ky);
        }
        for c in 0..f.components() {
            out.coeffs_mut()[c * npts + idx] *= m;
        }
    }
    out
}

fn sphere_area(dim: usize) -> f64 {
    match dim {
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => unreachable!("grids are 2- or 3-dimensional"),
    }
}

/// Monte-Carlo estimate of `(∫ ‖Δ_y^k f‖_p^r |y|^{-sr-n} dy)^{1/r}`
/// (`sup_y ‖Δ_y^k f‖_p / |y|^s` when `r = ∞`).
///
/// Shifts are drawn log-uniformly in radius over `[L/N, L/2]` and uniformly
/// in direction.
pub fn difference_norm<R: Rng + ?Sized>(
    f: &SpectralField,
    s: f64,
    p: f64,
    r: f64,
    k: u32,
    shift_samples: usize,
    rng: &mut R,
) -> Result<f64> {
    if !(s > 0.0) || (k as f64) <= s {
        return Err(Error::Parameter(format!(
            "difference order k = {k} must exceed s = {s} > 0"
        )));
    }
    if shift_samples < MIN_SHIFT_SAMPLES {
        return Err(Error::Config(format!(
            "need at least {MIN_SHIFT_SAMPLES} shift samples, got {shift_samples}"
        )));
    }
    let grid = *f.grid();
    let dim = grid.dim();
    let (r_lo, r_hi) = (grid.length() / grid.size() as f64, grid.length() / 2.0);
    let log_span = (r_hi / r_lo).ln();

    let mut acc = 0.0f64;
    let mut sup = 0.0f64;
    for _ in 0..shift_samples {
        let radius = r_lo * (log_span * rng.random::<f64>()).exp();
        let mut dir = [0.0; 3];
        let mut len = 0.0;
        while len < 1e-12 {
            for d in dir.iter_mut().take(dim) {
                *d = StandardNormal.sample(rng);
            }
            len = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        }
        let y: Vec<f64> = dir[..dim].iter().map(|d| radius * d / len).collect();
        let diff = lp_norm(&kth_difference(f, &y, k), p);
        if r.is_infinite() {
            sup = sup.max(diff / radius.powf(s));
        } else {
            acc += (diff / radius.powf(s)).powf(r);
        }
    }
    if r.is_infinite() {
        Ok(sup)
    } else {
        let mean = acc / shift_samples as f64;
        Ok((sphere_area(dim) * log_span * mean).powf(1.0 / r))
    }
}

/// Ratio `difference_norm / besov_norm` on the cosine mode at the centre of
/// the resolved annulus along the first axis.
///
/// Dividing a difference-norm estimate by this constant puts it on the scale
/// of the dyadic norm.
pub fn equivalence_constant<R: Rng + ?Sized>(
    cutoff: &DyadicCutoff,
    grid: &crate::spectral::Grid,
    idx: &BesovIndex,
    k: u32,
    shift_samples: usize,
    rng: &mut R,
) -> Result<f64> {
    let (lo, hi) = cutoff.resolved_annulus();
    let z = ((lo * hi).sqrt() / grid.k0()).round() as i64;
    let mut lattice = vec![0i64; grid.dim()];
    lattice[0] = z;
    let mode = SpectralField::cosine_mode(*grid, &lattice, 1.0)?;
    let diff = difference_norm(&mode, idx.s, idx.p, idx.r, k, shift_samples, rng)?;
    Ok(diff / besov_norm(&mode, idx, cutoff)?)
}
