//! Exact-in-space time stepping for `u' + (-Δ)^α u = g`.

use super::field::SpectralField;
use crate::error::{Error, Result};

fn rates(f: &SpectralField, alpha: f64) -> Vec<f64> {
    f.grid().modes().map(|(_, m)| m.norm.powf(2.0 * alpha)).collect()
}

/// Integrates `u' + (-Δ)^α u = g` from `u(nodes[0]) = start`, holding `g`
/// at `held[j]` on `(nodes[j], nodes[j+1]]`.
///
/// Each mode is advanced in closed form,
/// `u ← e^{-Δt λ} u + (1 - e^{-Δt λ})/λ · g` with `λ = |k|^{2α}` (limit `Δt`
/// at `λ = 0`), so the result is exact for piecewise-constant forcing.
pub fn evolve(
    start: &SpectralField,
    nodes: &[f64],
    held: &[SpectralField],
    alpha: f64,
) -> Result<Vec<SpectralField>> {
    if held.len() + 1 != nodes.len() {
        return Err(Error::Shape(format!(
            "{} nodes need {} forcing values, got {}",
            nodes.len(),
            nodes.len().saturating_sub(1),
            held.len()
        )));
    }
    if nodes.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Parameter("nodes must be strictly increasing".into()));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Parameter(format!("alpha must be > 0, got {alpha}")));
    }
    for g in held {
        start.same_shape(g)?;
    }
    let lam = rates(start, alpha);
    let npts = start.grid().points();
    let mut out = Vec::with_capacity(nodes.len());
    out.push(start.clone());
    for (j, g) in held.iter().enumerate() {
        let dt = nodes[j + 1] - nodes[j];
        let mut next = out[j].clone();
        for (idx, &l) in lam.iter().enumerate() {
            let decay = (-dt * l).exp();
            let weight = if l == 0.0 { dt } else { -(-dt * l).exp_m1() / l };
            for c in 0..start.components() {
                let k = c * npts + idx;
                next.coeffs_mut()[k] = next.coeffs()[k] * decay + g.coeffs()[k] * weight;
            }
        }
        out.push(next);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{semigroup_apply, Grid};

    #[test]
    fn free_evolution_is_the_semigroup() {
        let g = Grid::periodic(2, 16).unwrap();
        let a = SpectralField::cosine_mode(g, &[2, 1], 1.0).unwrap();
        let nodes = [0.0, 0.1, 0.35, 1.0];
        let zero = vec![SpectralField::zeros(g, 1); 3];
        let out = evolve(&a, &nodes, &zero, 0.75).unwrap();
        for (u, &t) in out.iter().zip(&nodes) {
            let expect = semigroup_apply(&a, t, 0.75).unwrap();
            assert!(u.sub(&expect).unwrap().max_abs_coeff() < 1e-15);
        }
    }

    #[test]
    fn constant_forcing_closed_form() {
        let g = Grid::periodic(2, 16).unwrap();
        let f = SpectralField::cosine_mode(g, &[0, 2], 1.0).unwrap();
        let nodes: Vec<f64> = (0..9).map(|j| j as f64 * 0.125).collect();
        let held = vec![f.clone(); 8];
        let out = evolve(&SpectralField::zeros(g, 1), &nodes, &held, 1.0).unwrap();
        for (u, &t) in out.iter().zip(&nodes) {
            let factor = (1.0 - (-4.0 * t).exp()) / 4.0;
            assert!(u.sub(&f.scaled(factor)).unwrap().max_abs_coeff() < 1e-15);
        }
    }

    #[test]
    fn shape_errors() {
        let g = Grid::periodic(2, 16).unwrap();
        let z = SpectralField::zeros(g, 1);
        assert!(matches!(
            evolve(&z, &[0.0, 1.0], &[], 1.0),
            Err(Error::Shape(_))
        ));
    }
}
