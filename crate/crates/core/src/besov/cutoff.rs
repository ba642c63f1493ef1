use crate::error::{Error, Result};
use crate::spectral::{Grid, RadialTable};

/// Inner and outer radius of the annulus carrying `φ`.
pub const SUPPORT: (f64, f64) = (0.75, 8.0 / 3.0);

// `χ` equals 1 below CHI_INNER and 0 above CHI_OUTER.
const CHI_INNER: f64 = 0.75;
const CHI_OUTER: f64 = 4.0 / 3.0;

const TABLE_POINTS: usize = 2049;

fn bump_tail(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// Smooth monotone step from 0 (x <= 0) to 1 (x >= 1).
fn smooth_step(x: f64) -> f64 {
    let a = bump_tail(x);
    let b = bump_tail(1.0 - x);
    a / (a + b)
}

/// Radial low-pass `χ`: 1 on `[0, 3/4]`, 0 on `[4/3, ∞)`, nonincreasing.
pub fn chi(r: f64) -> f64 {
    if r <= CHI_INNER {
        1.0
    } else if r >= CHI_OUTER {
        0.0
    } else {
        1.0 - smooth_step((r - CHI_INNER) / (CHI_OUTER - CHI_INNER))
    }
}

/// Annulus function `φ(r) = χ(r/2) - χ(r)`.
///
/// The sum over `q` of `φ(2^{-q} r)` telescopes to 1 for every `r > 0`.
pub fn phi(r: f64) -> f64 {
    chi(r / 2.0) - chi(r)
}

/// Littlewood-Paley partition restricted to the blocks a grid resolves.
#[derive(Debug, Clone)]
pub struct DyadicCutoff {
    k0: f64,
    size: usize,
    q_min: i32,
    q_max: i32,
    table: RadialTable,
}

/// Builds the cutoff for `grid`: blocks `q` whose annulus `2^q (3/4, 8/3)`
/// lies between the fundamental wavenumber and the axis Nyquist wavenumber.
pub fn build_cutoff(grid: &Grid) -> Result<DyadicCutoff> {
    let k0 = grid.k0();
    let top = grid.nyquist_wavenumber();

    let mut q_min = (k0 / SUPPORT.0).log2().floor() as i32 - 1;
    while 2f64.powi(q_min) * SUPPORT.0 < k0 {
        q_min += 1;
    }
    let mut q_max = (top / SUPPORT.1).log2().ceil() as i32 + 1;
    while 2f64.powi(q_max) * SUPPORT.1 > top {
        q_max -= 1;
    }
    if q_max - q_min + 1 < 3 {
        return Err(Error::Config(format!(
            "grid resolves only blocks {q_min}..={q_max}; at least 3 are needed (N = {})",
            grid.size()
        )));
    }

    let radii: Vec<f64> = (0..TABLE_POINTS)
        .map(|i| 3.0 * i as f64 / (TABLE_POINTS - 1) as f64)
        .collect();
    let values = radii.iter().map(|&r| phi(r)).collect();
    Ok(DyadicCutoff {
        k0,
        size: grid.size(),
        q_min,
        q_max,
        table: RadialTable::new(radii, values)?,
    })
}

impl DyadicCutoff {
    pub fn q_min(&self) -> i32 {
        self.q_min
    }

    pub fn q_max(&self) -> i32 {
        self.q_max
    }

    pub fn blocks(&self) -> impl Iterator<Item = i32> {
        self.q_min..=self.q_max
    }

    /// `φ(r)`, evaluated in closed form.
    pub fn phi(&self, r: f64) -> f64 {
        phi(r)
    }

    /// Weight of wavenumber `r` in block `q`, `φ(2^{-q} r)`.
    pub fn weight(&self, q: i32, r: f64) -> f64 {
        phi(r * 2f64.powi(-q))
    }

    /// Tabulated `φ` on `[0, 3]`.
    pub fn table(&self) -> &RadialTable {
        &self.table
    }

    /// Radii on which the resolved blocks sum to exactly 1:
    /// `[2^{q_min} 4/3, 2^{q_max} 3/2]`.
    pub fn resolved_annulus(&self) -> (f64, f64) {
        (
            2f64.powi(self.q_min) * CHI_OUTER,
            2f64.powi(self.q_max) * 2.0 * CHI_INNER,
        )
    }

    pub fn contains_block(&self, q: i32) -> bool {
        (self.q_min..=self.q_max).contains(&q)
    }

    pub fn matches(&self, grid: &Grid) -> bool {
        self.size == grid.size() && (self.k0 - grid.k0()).abs() <= 1e-12 * self.k0
    }
}
