//! Fourier-multiplier operators.

use num_complex::Complex64;

use super::field::SpectralField;
use super::grid::Mode;
use crate::error::{Error, Result};

/// Radial profile sampled at increasing radii, linearly interpolated and
/// clamped to its end values.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialTable {
    radii: Vec<f64>,
    values: Vec<f64>,
}

impl RadialTable {
    pub fn new(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if radii.len() != values.len() || radii.len() < 2 {
            return Err(Error::Shape(
                "radial table needs >= 2 matching radii and values".into(),
            ));
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parameter("radial table radii must increase".into()));
        }
        Ok(Self { radii, values })
    }

    pub fn eval(&self, r: f64) -> f64 {
        let n = self.radii.len();
        if r <= self.radii[0] {
            return self.values[0];
        }
        if r >= self.radii[n - 1] {
            return self.values[n - 1];
        }
        let j = self.radii.partition_point(|&x| x <= r);
        let (r0, r1) = (self.radii[j - 1], self.radii[j]);
        let w = (r - r0) / (r1 - r0);
        self.values[j - 1] * (1.0 - w) + self.values[j] * w
    }
}

/// Scalar symbol `m(ξ)` of a Fourier multiplier.
#[derive(Debug, Clone, PartialEq)]
pub enum Symbol {
    /// `|ξ|^{2γ}`; zero at the zero mode unless `γ = 0`.
    Power { gamma: f64 },
    /// `exp(-t |ξ|^{2α})`; one at the zero mode.
    Exponential { t: f64, alpha: f64 },
    /// `i ξ_axis`; zero at the zero mode and on the Nyquist plane of `axis`.
    Derivative { axis: usize },
    Radial(RadialTable),
}

impl Symbol {
    pub fn eval(&self, mode: &Mode) -> Complex64 {
        match self {
            Symbol::Power { gamma } => {
                if *gamma == 0.0 {
                    Complex64::new(1.0, 0.0)
                } else if mode.is_zero() {
                    Complex64::default()
                } else {
                    Complex64::new(mode.norm.powf(2.0 * gamma), 0.0)
                }
            }
            Symbol::Exponential { t, alpha } => {
                Complex64::new((-t * mode.norm.powf(2.0 * alpha)).exp(), 0.0)
            }
            Symbol::Derivative { axis } => {
                if mode.nyquist[*axis] {
                    Complex64::default()
                } else {
                    Complex64::new(0.0, mode.k[*axis])
                }
            }
            Symbol::Radial(table) => Complex64::new(table.eval(mode.norm), 0.0),
        }
    }
}

/// Multiplies every coefficient of every component by `m(k)`.
pub fn apply_multiplier(f: &SpectralField, symbol: &Symbol) -> Result<SpectralField> {
    if let Symbol::Derivative { axis } = symbol {
        if *axis >= f.grid().dim() {
            return Err(Error::Parameter(format!(
                "derivative axis {axis} out of range"
            )));
        }
    }
    let grid = *f.grid();
    let npts = grid.points();
    let mut out = f.clone();
    for (idx, mode) in grid.modes() {
        let m = symbol.eval(&mode);
        if !(m.re.is_finite() && m.im.is_finite()) {
            return Err(Error::Evaluation {
                wavevector: mode.k[..grid.dim()].to_vec(),
            });
        }
        for c in 0..f.components() {
            out.coeffs_mut()[c * npts + idx] *= m;
        }
    }
    Ok(out)
}

/// Applies a real radial profile `g(|k|)`.
pub fn apply_radial<G: Fn(f64) -> f64>(f: &SpectralField, g: G) -> SpectralField {
    let grid = *f.grid();
    let npts = grid.points();
    let mut out = f.clone();
    for (idx, mode) in grid.modes() {
        let m = g(mode.norm);
        for c in 0..f.components() {
            out.coeffs_mut()[c * npts + idx] *= m;
        }
    }
    out
}

/// `(-Δ)^α`, with the zero mode mapped to 0 for every `α`.
pub fn fractional_laplacian(f: &SpectralField, alpha: f64) -> Result<SpectralField> {
    let n = f.grid().dim() as f64;
    if !alpha.is_finite() || alpha <= -n / 2.0 {
        return Err(Error::Parameter(format!(
            "fractional power must be a finite real above -n/2, got {alpha}"
        )));
    }
    let mut out = apply_multiplier(f, &Symbol::Power { gamma: alpha })?;
    out.clear_zero_mode();
    Ok(out)
}

pub fn gradient(f: &SpectralField) -> Result<SpectralField> {
    if f.components() != 1 {
        return Err(Error::Shape(format!(
            "gradient needs a scalar field, got {} components",
            f.components()
        )));
    }
    let parts = (0..f.grid().dim())
        .map(|axis| apply_multiplier(f, &Symbol::Derivative { axis }))
        .collect::<Result<Vec<_>>>()?;
    SpectralField::stack(&parts)
}

pub fn divergence(u: &SpectralField) -> Result<SpectralField> {
    if !u.is_vector() {
        return Err(Error::Shape(format!(
            "divergence needs {} components, got {}",
            u.grid().dim(),
            u.components()
        )));
    }
    let grid = *u.grid();
    let npts = grid.points();
    let mut out = SpectralField::zeros(grid, 1);
    for (idx, mode) in grid.modes() {
        let mut acc = Complex64::default();
        for j in 0..grid.dim() {
            acc += Symbol::Derivative { axis: j }.eval(&mode) * u.coeffs()[j * npts + idx];
        }
        out.coeffs_mut()[idx] = acc;
    }
    Ok(out)
}

/// Leray projection `û - k (k·û)/|k|²` onto divergence-free fields.
///
/// On Nyquist planes the derivative symbol vanishes, so the projection uses
/// the wavevector with those coordinates zeroed; this keeps `P` consistent
/// with [`divergence`] and exactly idempotent.
pub fn leray_project(u: &SpectralField) -> Result<SpectralField> {
    if !u.is_vector() {
        return Err(Error::Shape(format!(
            "projection needs {} components, got {}",
            u.grid().dim(),
            u.components()
        )));
    }
    let grid = *u.grid();
    let dim = grid.dim();
    let npts = grid.points();
    let mut out = u.clone();
    for (idx, mode) in grid.modes() {
        let mut k = [0.0; 3];
        for a in 0..dim {
            if !mode.nyquist[a] {
                k[a] = mode.k[a];
            }
        }
        let k2: f64 = k.iter().map(|v| v * v).sum();
        if k2 == 0.0 {
            continue;
        }
        let mut dot = Complex64::default();
        for (a, ka) in k.iter().enumerate().take(dim) {
            dot += u.coeffs()[a * npts + idx] * ka;
        }
        for (a, ka) in k.iter().enumerate().take(dim) {
            out.coeffs_mut()[a * npts + idx] -= dot * (ka / k2);
        }
    }
    Ok(out)
}

/// `e^{-t(-Δ)^α}`.
pub fn semigroup_apply(f: &SpectralField, t: f64, alpha: f64) -> Result<SpectralField> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Parameter(format!("time must be >= 0, got {t}")));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Parameter(format!("alpha must be > 0, got {alpha}")));
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    apply_multiplier(f, &Symbol::Exponential { t, alpha })
}
