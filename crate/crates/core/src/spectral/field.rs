use num_complex::Complex64;
use rustfft::FftDirection;

use super::fft::fft_nd;
use super::grid::Grid;
use crate::error::{Error, Result};

/// Fourier coefficients of a real scalar or vector field on a periodic grid.
///
/// The physical field is `u(x) = Σ_k c_k e^{i k·x}`, so a coefficient of 1 at
/// `k` and its conjugate partner describe `2 cos(k·x)`. Coefficients are
/// stored component-major, each component in row-major lattice order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    components: usize,
    coeffs: Vec<Complex64>,
}

/// Point values of a real field on the grid, laid out like [`SpectralField`].
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    grid: Grid,
    components: usize,
    values: Vec<f64>,
}

impl SpectralField {
    pub fn zeros(grid: Grid, components: usize) -> Self {
        Self {
            grid,
            components,
            coeffs: vec![Complex64::default(); components * grid.points()],
        }
    }

    pub fn from_coeffs(grid: Grid, components: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if components == 0 || coeffs.len() != components * grid.points() {
            return Err(Error::Shape(format!(
                "expected {} coefficients for {} component(s), got {}",
                components * grid.points(),
                components,
                coeffs.len()
            )));
        }
        Ok(Self {
            grid,
            components,
            coeffs,
        })
    }

    /// Samples `f` at the grid points and transforms.
    pub fn from_fn<F>(grid: Grid, components: usize, f: F) -> Self
    where
        F: Fn(&[f64; 3]) -> [f64; 3],
    {
        let npts = grid.points();
        let mut values = vec![0.0; components * npts];
        for idx in 0..npts {
            let v = f(&grid.position(idx));
            for c in 0..components {
                values[c * npts + idx] = v[c];
            }
        }
        PhysicalField {
            grid,
            components,
            values,
        }
        .to_spectral()
    }

    /// Scalar field `amplitude * cos(k·x)` for the lattice vector `z`.
    pub fn cosine_mode(grid: Grid, z: &[i64], amplitude: f64) -> Result<Self> {
        let mut out = Self::zeros(grid, 1);
        out.add_mode(0, z, Complex64::new(amplitude / 2.0, 0.0))?;
        Ok(out)
    }

    /// Adds `c e^{ik·x} + conj(c) e^{-ik·x}` to component `component`.
    pub fn add_mode(&mut self, component: usize, z: &[i64], c: Complex64) -> Result<()> {
        let idx = self
            .grid
            .index_of(z)
            .ok_or_else(|| Error::Range(format!("lattice vector {z:?} is not resolved")))?;
        let conj = self.grid.conjugate_index(idx);
        let npts = self.grid.points();
        if idx == conj {
            self.coeffs[component * npts + idx] += Complex64::new(2.0 * c.re, 0.0);
        } else {
            self.coeffs[component * npts + idx] += c;
            self.coeffs[component * npts + conj] += c.conj();
        }
        Ok(())
    }

    /// Packs scalar fields into one vector field.
    pub fn stack(parts: &[SpectralField]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Shape("cannot stack zero components".into()))?;
        let mut coeffs = Vec::with_capacity(parts.len() * first.grid.points());
        for p in parts {
            if p.grid != first.grid || p.components != 1 {
                return Err(Error::Shape("stack needs scalar fields on one grid".into()));
            }
            coeffs.extend_from_slice(&p.coeffs);
        }
        Self::from_coeffs(first.grid, parts.len(), coeffs)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let n = self.grid.points();
        &self.coeffs[c * n..(c + 1) * n]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let n = self.grid.points();
        &mut self.coeffs[c * n..(c + 1) * n]
    }

    pub fn component_field(&self, c: usize) -> SpectralField {
        SpectralField {
            grid: self.grid,
            components: 1,
            coeffs: self.component(c).to_vec(),
        }
    }

    pub fn coeff(&self, component: usize, z: &[i64]) -> Option<Complex64> {
        self.grid
            .index_of(z)
            .map(|idx| self.coeffs[component * self.grid.points() + idx])
    }

    pub fn is_vector(&self) -> bool {
        self.components == self.grid.dim()
    }

    pub fn same_shape(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid || self.components != other.components {
            return Err(Error::Shape(format!(
                "fields differ: {} component(s) on {:?} vs {} on {:?}",
                self.components, self.grid, other.components, other.grid
            )));
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> SpectralField {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= factor);
        out
    }

    /// `self + factor * other`.
    pub fn axpy(&self, factor: f64, other: &SpectralField) -> Result<SpectralField> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b * factor;
        }
        Ok(out)
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        self.axpy(-1.0, other)
    }

    /// Discrete `L²` inner product, exact by Parseval.
    pub fn inner(&self, other: &SpectralField) -> Result<f64> {
        self.same_shape(other)?;
        let s: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        Ok(s * self.grid.volume())
    }

    pub fn l2_norm(&self) -> f64 {
        (self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.volume()).sqrt()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn clear_zero_mode(&mut self) {
        let n = self.grid.points();
        for c in 0..self.components {
            self.coeffs[c * n] = Complex64::default();
        }
    }

    /// Largest violation of `c(-k) = conj(c(k))`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.points();
        let mut worst = 0.0f64;
        for c in 0..self.components {
            for idx in 0..n {
                let j = self.grid.conjugate_index(idx);
                let d = (self.coeffs[c * n + idx] - self.coeffs[c * n + j].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Copies the coefficients onto a lattice with `size` points per axis.
    ///
    /// Modes outside the smaller lattice, and its Nyquist planes, are dropped.
    pub fn resample(&self, size: usize) -> Result<SpectralField> {
        let target = self.grid.with_size(size)?;
        let dim = self.grid.dim();
        let span = self.grid.size().min(size) - 1;
        let half = (span / 2) as i64;
        let wrap = |z: i64, n: usize| if z < 0 { (z + n as i64) as usize } else { z as usize };
        let (n_src, n_dst) = (self.grid.points(), target.points());
        let mut out = SpectralField::zeros(target, self.components);
        for flat in 0..span.pow(dim as u32) {
            let (mut src, mut dst, mut rest) = (0usize, 0usize, flat);
            for _ in 0..dim {
                let z = (rest % span) as i64 - half;
                rest /= span;
                src = src * self.grid.size() + wrap(z, self.grid.size());
                dst = dst * size + wrap(z, size);
            }
            for c in 0..self.components {
                out.coeffs[c * n_dst + dst] = self.coeffs[c * n_src + src];
            }
        }
        Ok(out)
    }

    /// Inverse transform. Components are paired into one complex transform,
    /// which keeps exactly the real part of each component's synthesis.
    pub fn to_physical(&self) -> PhysicalField {
        let npts = self.grid.points();
        let conj = conjugate_table(&self.grid);
        let mut values = vec![0.0; self.components * npts];
        let mut buf = vec![Complex64::default(); npts];
        let mut c = 0;
        while c < self.components {
            let first = self.component(c);
            let second = (c + 1 < self.components).then(|| self.component(c + 1));
            for (idx, b) in buf.iter_mut().enumerate() {
                let j = conj[idx];
                let a = (first[idx] + first[j].conj()) * 0.5;
                *b = match second {
                    Some(s) => a + Complex64::i() * ((s[idx] + s[j].conj()) * 0.5),
                    None => a,
                };
            }
            fft_nd(
                &mut buf,
                self.grid.dim(),
                self.grid.size(),
                FftDirection::Inverse,
            );
            for (v, b) in values[c * npts..(c + 1) * npts].iter_mut().zip(&buf) {
                *v = b.re;
            }
            if second.is_some() {
                for (v, b) in values[(c + 1) * npts..(c + 2) * npts].iter_mut().zip(&buf) {
                    *v = b.im;
                }
            }
            c += 2;
        }
        PhysicalField {
            grid: self.grid,
            components: self.components,
            values,
        }
    }
}

fn conjugate_table(grid: &Grid) -> Vec<usize> {
    let n = grid.size();
    let mut table = vec![0usize; grid.points()];
    for (idx, slot) in table.iter_mut().enumerate() {
        let (mut out, mut rest) = (0usize, idx);
        let mut stride = 1;
        for _ in 0..grid.dim() {
            out += ((n - rest % n) % n) * stride;
            rest /= n;
            stride *= n;
        }
        *slot = out;
    }
    table
}

impl PhysicalField {
    pub fn new(grid: Grid, components: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != components * grid.points() {
            return Err(Error::Shape(format!(
                "expected {} values, got {}",
                components * grid.points(),
                values.len()
            )));
        }
        Ok(Self {
            grid,
            components,
            values,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let n = self.grid.points();
        &self.values[c * n..(c + 1) * n]
    }

    /// Vector value at grid point `idx`.
    pub fn at(&self, idx: usize) -> [f64; 3] {
        let n = self.grid.points();
        let mut v = [0.0; 3];
        for (c, slot) in v.iter_mut().enumerate().take(self.components) {
            *slot = self.values[c * n + idx];
        }
        v
    }

    /// Pointwise Euclidean magnitude over components.
    pub fn magnitude(&self) -> Vec<f64> {
        let n = self.grid.points();
        (0..n)
            .map(|idx| {
                (0..self.components)
                    .map(|c| self.values[c * n + idx].powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }

    /// Discrete `L^p` norm with quadrature weight `(L/N)^n`; `p = ∞` is the grid sup.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let mag = self.magnitude();
        if p.is_infinite() {
            return mag.into_iter().fold(0.0, f64::max);
        }
        let sum: f64 = if p == 2.0 {
            mag.iter().map(|m| m * m).sum()
        } else {
            mag.iter().map(|m| m.powf(p)).sum()
        };
        (sum * self.grid.cell_volume()).powf(1.0 / p)
    }

    /// Forward transform, two real components per complex transform.
    pub fn to_spectral(&self) -> SpectralField {
        let npts = self.grid.points();
        let scale = 1.0 / npts as f64;
        let conj = conjugate_table(&self.grid);
        let mut coeffs = vec![Complex64::default(); self.components * npts];
        let mut buf = vec![Complex64::default(); npts];
        let mut c = 0;
        while c < self.components {
            let paired = c + 1 < self.components;
            for (idx, b) in buf.iter_mut().enumerate() {
                let im = if paired { self.values[(c + 1) * npts + idx] } else { 0.0 };
                *b = Complex64::new(self.values[c * npts + idx], im);
            }
            fft_nd(&mut buf, self.grid.dim(), self.grid.size(), FftDirection::Forward);
            if paired {
                for idx in 0..npts {
                    let (z, zc) = (buf[idx], buf[conj[idx]].conj());
                    coeffs[c * npts + idx] = (z + zc) * (0.5 * scale);
                    coeffs[(c + 1) * npts + idx] = (z - zc) * Complex64::new(0.0, -0.5 * scale);
                }
            } else {
                for (o, b) in coeffs[c * npts..(c + 1) * npts].iter_mut().zip(&buf) {
                    *o = b * scale;
                }
            }
            c += 2;
        }
        SpectralField {
            grid: self.grid,
            components: self.components,
            coeffs,
        }
    }
}
