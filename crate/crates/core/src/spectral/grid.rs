use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Periodic box `[0, L)^n` sampled with `N` points per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    size: usize,
    length: f64,
}

/// One point of the resolved wavevector lattice.
#[derive(Debug, Clone, Copy)]
pub struct Mode {
    /// Integer lattice coordinates in FFT order (`-N/2..N/2`).
    pub z: [i64; 3],
    /// Physical wavevector `k0 * z`.
    pub k: [f64; 3],
    /// Euclidean length of `k`.
    pub norm: f64,
    /// Per-axis flag: the coordinate sits on the Nyquist plane `z_i = -N/2`.
    pub nyquist: [bool; 3],
}

impl Mode {
    pub fn is_zero(&self) -> bool {
        self.z == [0; 3]
    }

    pub fn on_nyquist(&self) -> bool {
        self.nyquist.iter().any(|&b| b)
    }
}

impl Grid {
    pub fn new(dim: usize, size: usize, length: f64) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::Parameter(format!(
                "spatial dimension must be 2 or 3, got {dim}"
            )));
        }
        if size < 8 || !size.is_power_of_two() {
            return Err(Error::Parameter(format!(
                "points per axis must be a power of two >= 8, got {size}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Parameter(format!(
                "box length must be positive, got {length}"
            )));
        }
        Ok(Self { dim, size, length })
    }

    /// Box of side `2π`, so that the fundamental wavenumber is 1.
    pub fn periodic(dim: usize, size: usize) -> Result<Self> {
        Self::new(dim, size, 2.0 * PI)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Fundamental wavenumber `2π / L`.
    pub fn k0(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Number of lattice points, `N^n`.
    pub fn points(&self) -> usize {
        self.size.pow(self.dim as u32)
    }

    /// Quadrature weight `(L/N)^n` of one grid cell.
    pub fn cell_volume(&self) -> f64 {
        (self.length / self.size as f64).powi(self.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    /// Largest wavenumber magnitude along a single axis, `k0 * N / 2`.
    pub fn nyquist_wavenumber(&self) -> f64 {
        self.k0() * (self.size / 2) as f64
    }

    /// Same lattice on a box of a different side length.
    pub fn with_length(&self, length: f64) -> Result<Self> {
        Self::new(self.dim, self.size, length)
    }

    /// Same box with a different number of points per axis.
    ///
    /// Any even size from 8 up is accepted here, so that refinement lattices
    /// for nonlinear products (`3N`) can be built.
    pub fn with_size(&self, size: usize) -> Result<Self> {
        if size < 8 || size % 2 != 0 {
            return Err(Error::Parameter(format!(
                "points per axis must be even and >= 8, got {size}"
            )));
        }
        Ok(Self { size, ..*self })
    }

    fn signed(&self, i: usize) -> i64 {
        let n = self.size as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Flat index of the signed lattice coordinate `z` (row-major, axis 0 slowest).
    pub fn index_of(&self, z: &[i64]) -> Option<usize> {
        let n = self.size as i64;
        let mut idx = 0usize;
        for &zi in z.iter().take(self.dim) {
            if zi < -n / 2 || zi >= n / 2 {
                return None;
            }
            idx = idx * self.size + zi.rem_euclid(n) as usize;
        }
        Some(idx)
    }

    pub fn mode(&self, idx: usize) -> Mode {
        let k0 = self.k0();
        let half = (self.size / 2) as i64;
        let mut z = [0i64; 3];
        let mut rest = idx;
        for axis in (0..self.dim).rev() {
            z[axis] = self.signed(rest % self.size);
            rest /= self.size;
        }
        let mut k = [0.0; 3];
        let mut nyquist = [false; 3];
        for axis in 0..self.dim {
            k[axis] = k0 * z[axis] as f64;
            nyquist[axis] = z[axis] == -half;
        }
        let norm = k.iter().map(|v| v * v).sum::<f64>().sqrt();
        Mode {
            z,
            k,
            norm,
            nyquist,
        }
    }

    pub fn modes(&self) -> impl Iterator<Item = (usize, Mode)> + '_ {
        (0..self.points()).map(move |idx| (idx, self.mode(idx)))
    }

    /// Physical coordinates of grid point `idx`.
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let h = self.length / self.size as f64;
        let mut x = [0.0; 3];
        let mut rest = idx;
        for axis in (0..self.dim).rev() {
            x[axis] = h * (rest % self.size) as f64;
            rest /= self.size;
        }
        x
    }

    /// Index of the lattice point `-z`.
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let mut out = 0usize;
        let mut stride = 1usize;
        let mut rest = idx;
        for _ in 0..self.dim {
            let i = rest % self.size;
            let j = (self.size - i) % self.size;
            out += j * stride;
            stride *= self.size;
            rest /= self.size;
        }
        out
    }
}
