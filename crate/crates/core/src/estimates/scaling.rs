//! Invariance of the critical norms under `u ↦ λ^{(2α-1)/m} u(λx, λ^{2α}t)`.
//!
//! The dilate `f(λ·)` of a periodic field is again periodic on the same box,
//! so it is represented on the same lattice with mode `z` moved to `λz`. One
//! period cell of the dilate is a copy of `f(λ·)` restricted to a box of side
//! `L/λ`; its `L^p` norm over the full box therefore equals the whole-space
//! norm times `λ^{n/p}`, and that factor is divided out.

use serde::Serialize;

use super::hypotheses::HypothesisSet;
use crate::besov::{besov_norm, build_cutoff, BesovIndex, DyadicCutoff};
use crate::error::{Error, Result};
use crate::lorentz::{log_uniform_nodes, lorentz_norm, LorentzIndex, TimeSamples};
use crate::report::num;
use crate::spectral::{semigroup_apply, SpectralField};

/// Largest admissible deviation of a ratio from 1.
pub const SCALING_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    #[serde(serialize_with = "num")]
    pub lambda: f64,
    /// Critical initial norm of the rescaled datum over that of `a`.
    #[serde(serialize_with = "num")]
    pub initial_ratio: f64,
    /// Same for `‖u‖_{L^{ρ,r}_T(Ḃ^{s+2α}_{p,1})}` of the linear evolution.
    #[serde(serialize_with = "num")]
    pub trajectory_ratio: f64,
    pub within_tolerance: bool,
}

/// `f(2^j ·)` on the lattice of `f`.
pub fn dilate(f: &SpectralField, j: i32) -> Result<SpectralField> {
    let grid = *f.grid();
    let npts = grid.points();
    let mut out = SpectralField::zeros(grid, f.components());
    for (idx, mode) in grid.modes() {
        if (0..f.components()).all(|c| f.coeffs()[c * npts + idx].norm() == 0.0) {
            continue;
        }
        let mut z = mode.z;
        for zi in z.iter_mut().take(grid.dim()) {
            if j >= 0 {
                *zi <<= j;
            } else {
                let d = 1i64 << (-j);
                if *zi % d != 0 {
                    return Err(Error::Range(format!(
                        "mode {:?} is not divisible by 2^{}",
                        &mode.z[..grid.dim()],
                        -j
                    )));
                }
                *zi /= d;
            }
        }
        let half = (grid.size() / 2) as i64;
        let target = match grid.index_of(&z[..grid.dim()]) {
            Some(t) if z.iter().all(|zi| zi.abs() < half) => t,
            _ => {
                return Err(Error::Range(format!(
                    "dilate of mode {:?} by 2^{j} leaves the resolved lattice",
                    &mode.z[..grid.dim()]
                )))
            }
        };
        for c in 0..f.components() {
            out.coeffs_mut()[c * npts + target] = f.coeffs()[c * npts + idx];
        }
    }
    Ok(out)
}

fn require_resolved(f: &SpectralField, cutoff: &DyadicCutoff, what: &str) -> Result<()> {
    let (lo, hi) = cutoff.resolved_annulus();
    let npts = f.grid().points();
    for (idx, mode) in f.grid().modes() {
        let live = (0..f.components()).any(|c| f.coeffs()[c * npts + idx].norm() > 0.0);
        if live && (mode.norm < lo || mode.norm > hi) {
            return Err(Error::Range(format!(
                "{what} has content at |k| = {} outside the resolved annulus [{lo}, {hi}]",
                mode.norm
            )));
        }
    }
    Ok(())
}

/// Compares the critical norms of `a` and of its linear evolution with those
/// of the rescaled pair for `λ = 2^j`, sampling `u` at `nodes` log-uniform
/// times on `(0, horizon]`.
pub fn scaling_invariance_check(
    a: &SpectralField,
    h: &HypothesisSet,
    j: i32,
    nodes: usize,
    horizon: f64,
) -> Result<ScalingReport> {
    if a.grid().dim() != h.n {
        return Err(Error::Shape(format!(
            "field has dimension {}, hypotheses {}",
            a.grid().dim(),
            h.n
        )));
    }
    let lambda = 2f64.powi(j);
    let n = h.n as f64;
    let cutoff = build_cutoff(a.grid())?;
    let amp = lambda.powf((2.0 * h.alpha - 1.0) / h.m);
    let a_l = dilate(a, j)?.scaled(amp);
    if j != 0 {
        require_resolved(a, &cutoff, "field")?;
        require_resolved(&a_l, &cutoff, "dilate")?;
    }

    let init = BesovIndex::new(h.s0, h.p0, h.r)?;
    let initial_ratio = besov_norm(&a_l, &init, &cutoff)? * lambda.powf(-n / h.p0)
        / besov_norm(a, &init, &cutoff)?;

    let reg = BesovIndex::new(h.s + 2.0 * h.alpha, h.p, 1.0)?;
    let lorentz = LorentzIndex::new(h.rho, h.r)?;
    let time_scale = lambda.powf(2.0 * h.alpha);
    let ts = log_uniform_nodes(horizon, nodes);
    let trajectory_norm = |f: &SpectralField, times: &[f64], factor: f64, end: f64| {
        let values = times
            .iter()
            .map(|&t| Ok(besov_norm(&semigroup_apply(f, t, h.alpha)?, &reg, &cutoff)? * factor))
            .collect::<Result<Vec<_>>>()?;
        lorentz_norm(&TimeSamples::new(times.to_vec(), values)?, &lorentz, end)
    };
    let scaled_ts: Vec<f64> = ts.iter().map(|t| t / time_scale).collect();
    let trajectory_ratio = trajectory_norm(&a_l, &scaled_ts, lambda.powf(-n / h.p), horizon / time_scale)?
        / trajectory_norm(a, &ts, 1.0, horizon)?;

    let within_tolerance = (initial_ratio - 1.0).abs() <= SCALING_TOLERANCE
        && (trajectory_ratio - 1.0).abs() <= SCALING_TOLERANCE;
    Ok(ScalingReport {
        lambda,
        initial_ratio,
        trajectory_ratio,
        within_tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimates::hypotheses::{check_hypotheses, HypothesisInput};
    use crate::spectral::Grid;
    use num_complex::Complex64;

    fn h0_plane() -> HypothesisSet {
        check_hypotheses(&HypothesisInput::new(1.0, 2, 2.0, 1.0, 3.0)).unwrap()
    }

    #[test]
    fn dilate_moves_modes() {
        let g = Grid::periodic(2, 16).unwrap();
        let f = SpectralField::cosine_mode(g, &[1, 2], 1.0).unwrap();
        let d = dilate(&f, 1).unwrap();
        assert_eq!(d.coeff(0, &[2, 4]), Some(Complex64::new(0.5, 0.0)));
        assert_eq!(d.coeff(0, &[1, 2]), Some(Complex64::default()));
        assert_eq!(dilate(&d, -1).unwrap(), f);
        assert!(matches!(dilate(&f, -1), Err(Error::Range(_))));
        assert!(matches!(dilate(&f, 2), Err(Error::Range(_))));
    }

    #[test]
    fn unit_lambda_is_exact() {
        let g = Grid::new(2, 64, 4.0 * std::f64::consts::PI).unwrap();
        let a = SpectralField::cosine_mode(g, &[4, 0], 1.0).unwrap();
        let rep = scaling_invariance_check(&a, &h0_plane(), 0, 16, 1.0).unwrap();
        assert_eq!(rep.initial_ratio, 1.0);
        assert_eq!(rep.trajectory_ratio, 1.0);
    }

    #[test]
    fn doubling_a_single_mode() {
        // k0 = 1/2, so lattice point 4 has |k| = 2 and its dilate |k| = 4.
        let g = Grid::new(2, 64, 4.0 * std::f64::consts::PI).unwrap();
        let mut a = SpectralField::zeros(g, 2);
        a.add_mode(1, &[4, 0], Complex64::new(0.5, 0.0)).unwrap();
        a.add_mode(1, &[-4, 0], Complex64::new(0.5, 0.0)).unwrap();
        let h = h0_plane();
        let rep = scaling_invariance_check(&a, &h, 1, 32, 1.0).unwrap();
        // Both norms are exact up to the grid quadrature of |cos|^{p0}, taken
        // with 16 points per period before and 8 after dilation.
        let mean = |per: usize| {
            (0..per)
                .map(|i| (2.0 * std::f64::consts::PI * i as f64 / per as f64).cos().abs().powf(h.p0))
                .sum::<f64>()
                / per as f64
        };
        let oracle = (mean(8) / mean(16)).powf(1.0 / h.p0);
        assert!((rep.initial_ratio - oracle).abs() < 1e-10, "{rep:?} vs {oracle}");
        assert!((rep.trajectory_ratio - 1.0).abs() < 1e-10, "{rep:?}");
    }

    #[test]
    fn unresolved_content_is_rejected() {
        let g = Grid::new(2, 64, 4.0 * std::f64::consts::PI).unwrap();
        // |k| = 1 lies below the resolved annulus.
        let a = SpectralField::cosine_mode(g, &[2, 0], 1.0).unwrap();
        assert!(matches!(
            scaling_invariance_check(&a, &h0_plane(), 1, 8, 1.0),
            Err(Error::Range(_))
        ));
    }
}
