//! The power law `J_m(u) = |u|^{m-1} u` and the convective term `J_m(u)·∇v`.
//!
//! Pointwise products are formed on a lattice refined by `dealias_factor`
//! and truncated back. Factor 2 removes aliasing from quadratic products
//! entirely; for non-integer `m` nothing does, and the refinement only pushes
//! the aliased content away from the resolved band.

use crate::error::{Error, Result};
use crate::spectral::{apply_multiplier, PhysicalField, SpectralField, Symbol};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    m: f64,
    dealias_factor: usize,
}

impl PowerLaw {
    pub fn new(m: f64, dealias_factor: usize) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::Parameter(format!("power m must be positive, got {m}")));
        }
        if !(2..=4).contains(&dealias_factor) {
            return Err(Error::Parameter(format!(
                "dealias factor must be 2, 3 or 4, got {dealias_factor}"
            )));
        }
        Ok(Self { m, dealias_factor })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn dealias_factor(&self) -> usize {
        self.dealias_factor
    }
}

/// `|a|^{m-1} a` for a vector `a`, with `J_m(0) = 0`.
pub fn power_vec(a: &[f64], m: f64) -> Vec<f64> {
    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return vec![0.0; a.len()];
    }
    let w = norm.powf(m - 1.0);
    a.iter().map(|x| w * x).collect()
}

/// `J_m` applied pointwise to physical values, in place.
pub fn power_physical(u: &mut PhysicalField, m: f64) {
    let npts = u.grid().points();
    let comps = u.components();
    let mag = u.magnitude();
    let values = u.values_mut();
    for (idx, r) in mag.into_iter().enumerate() {
        let w = if r == 0.0 { 0.0 } else { r.powf(m - 1.0) };
        for c in 0..comps {
            values[c * npts + idx] *= w;
        }
    }
}

fn refined(f: &SpectralField, factor: usize) -> Result<PhysicalField> {
    Ok(f.resample(f.grid().size() * factor)?.to_physical())
}

pub fn apply_power(u: &SpectralField, pl: &PowerLaw) -> Result<SpectralField> {
    if pl.m == 1.0 {
        return Ok(u.clone());
    }
    let mut fine = refined(u, pl.dealias_factor)?;
    power_physical(&mut fine, pl.m);
    fine.to_spectral().resample(u.grid().size())
}

/// Component `i` is `Σ_j J_m(u)_j ∂_j v_i`.
pub fn convective_term(u: &SpectralField, v: &SpectralField, pl: &PowerLaw) -> Result<SpectralField> {
    Ok(convective_terms(&[u], v, pl)?.remove(0))
}

/// [`convective_term`] for several advecting fields and one `v`, sharing the
/// transforms of `∇v`.
pub fn convective_terms(
    us: &[&SpectralField],
    v: &SpectralField,
    pl: &PowerLaw,
) -> Result<Vec<SpectralField>> {
    let grid = *v.grid();
    let dim = grid.dim();
    for u in us {
        if u.grid() != v.grid() {
            return Err(Error::Shape("convective term on different grids".into()));
        }
        if !u.is_vector() {
            return Err(Error::Shape(format!(
                "advecting field needs {dim} components, got {}",
                u.components()
            )));
        }
    }
    let factor = pl.dealias_factor;
    let parts = (0..dim)
        .flat_map(|j| (0..v.components()).map(move |i| (j, i)))
        .map(|(j, i)| apply_multiplier(&v.component_field(i), &Symbol::Derivative { axis: j }))
        .collect::<Result<Vec<_>>>()?;
    // Row j * components + i holds ∂_j v_i.
    let dv = refined(&SpectralField::stack(&parts)?, factor)?;
    let fine_pts = dv.grid().points();

    let mut out = Vec::with_capacity(us.len());
    for u in us {
        let mut jm = refined(u, factor)?;
        if pl.m != 1.0 {
            power_physical(&mut jm, pl.m);
        }
        let mut acc = vec![0.0; v.components() * fine_pts];
        for j in 0..dim {
            let uj = jm.component(j);
            for i in 0..v.components() {
                let dvi = dv.component(j * v.components() + i);
                let slot = &mut acc[i * fine_pts..(i + 1) * fine_pts];
                for ((o, a), b) in slot.iter_mut().zip(uj).zip(dvi) {
                    *o += a * b;
                }
            }
        }
        out.push(
            PhysicalField::new(*jm.grid(), v.components(), acc)?
                .to_spectral()
                .resample(grid.size())?,
        );
    }
    Ok(out)
}

/// Pointwise product of two scalar fields, formed on the refined lattice.
pub fn pointwise_product(f: &SpectralField, g: &SpectralField, factor: usize) -> Result<SpectralField> {
    f.same_shape(g)?;
    if f.components() != 1 {
        return Err(Error::Shape("pointwise product of scalar fields only".into()));
    }
    let pair = refined(&SpectralField::stack(&[f.clone(), g.clone()])?, factor)?;
    let values: Vec<f64> = pair
        .component(0)
        .iter()
        .zip(pair.component(1))
        .map(|(a, b)| a * b)
        .collect();
    PhysicalField::new(*pair.grid(), 1, values)?
        .to_spectral()
        .resample(f.grid().size())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DifferenceBound {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// `|J_m(a) - J_m(b)|` against `m(|a|^{m-1} + |b|^{m-1})|a - b|` for `m > 1`
/// and `6|a - b|^m` for `0 < m <= 1`.
pub fn pointwise_difference_bound(a: &[f64], b: &[f64], m: f64) -> DifferenceBound {
    let ja = power_vec(a, m);
    let jb = power_vec(b, m);
    let lhs = ja
        .iter()
        .zip(&jb)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let gap = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let rhs = if m > 1.0 {
        m * (norm(a).powf(m - 1.0) + norm(b).powf(m - 1.0)) * gap
    } else {
        6.0 * gap.powf(m)
    };
    DifferenceBound {
        lhs,
        rhs,
        ok: lhs <= rhs + 1e-12,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{leray_project, Grid};
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(grid: Grid, comps: usize, band: i64, seed: u64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = SpectralField::zeros(grid, comps);
        for c in 0..comps {
            for _ in 0..6 {
                let z: Vec<i64> = (0..grid.dim()).map(|_| rng.random_range(-band..=band)).collect();
                if z.iter().all(|&x| x == 0) {
                    continue;
                }
                let amp = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                f.add_mode(c, &z, amp).unwrap();
            }
        }
        f
    }

    #[test]
    fn power_law_validation() {
        assert!(PowerLaw::new(0.0, 2).is_err());
        assert!(PowerLaw::new(1.5, 1).is_err());
        assert!(PowerLaw::new(1.5, 5).is_err());
        assert!(PowerLaw::new(0.3, 4).is_ok());
    }

    #[test]
    fn identity_at_m_one() {
        let g = Grid::periodic(2, 16).unwrap();
        let u = random_field(g, 2, 4, 3);
        assert_eq!(apply_power(&u, &PowerLaw::new(1.0, 2).unwrap()).unwrap(), u);
    }

    #[test]
    fn constant_field() {
        let g = Grid::periodic(2, 16).unwrap();
        let u = SpectralField::from_fn(g, 2, |_| [3.0, 4.0, 0.0]);
        let out = apply_power(&u, &PowerLaw::new(2.0, 2).unwrap()).unwrap();
        assert!((out.coeff(0, &[0, 0]).unwrap() - Complex64::new(15.0, 0.0)).norm() < 1e-12);
        assert!((out.coeff(1, &[0, 0]).unwrap() - Complex64::new(20.0, 0.0)).norm() < 1e-12);
        assert!(out.max_abs_coeff() < 20.0 + 1e-12);
    }

    #[test]
    fn cube_of_sine() {
        let g = Grid::periodic(2, 16).unwrap();
        let u = SpectralField::from_fn(g, 2, |x| [x[0].sin(), 0.0, 0.0]);
        let out = apply_power(&u, &PowerLaw::new(3.0, 2).unwrap()).unwrap().to_physical();
        for idx in 0..g.points() {
            let x = g.position(idx);
            assert!((out.component(0)[idx] - x[0].sin().powi(3)).abs() < 1e-12);
            assert!(out.component(1)[idx].abs() < 1e-12);
        }
    }

    #[test]
    fn odd_and_homogeneous_pointwise() {
        let g = Grid::periodic(2, 16).unwrap();
        let u = random_field(g, 2, 5, 11);
        for m in [0.5, 1.5, 2.0, 3.0] {
            let mut plus = u.to_physical();
            let mut minus = u.scaled(-1.0).to_physical();
            let mut scaled = u.scaled(2.5).to_physical();
            power_physical(&mut plus, m);
            power_physical(&mut minus, m);
            power_physical(&mut scaled, m);
            let lam = 2.5f64.powf(m);
            for ((p, q), s) in plus.values().iter().zip(minus.values()).zip(scaled.values()) {
                assert_eq!(*p, -*q);
                assert!((s - lam * p).abs() <= 1e-12 * (1.0 + s.abs()));
            }
        }
    }

    /// `u·∇v` by direct convolution over the lattice, truncated to `|z_i| < N/2`.
    fn direct_advection(u: &SpectralField, v: &SpectralField) -> SpectralField {
        let g = *u.grid();
        let n = g.points();
        let mut out = SpectralField::zeros(g, v.components());
        for (ia, ma) in g.modes() {
            for (ib, mb) in g.modes() {
                let z: Vec<i64> = (0..2).map(|d| ma.z[d] + mb.z[d]).collect();
                if z.iter().any(|x| x.abs() >= (g.size() / 2) as i64) {
                    continue;
                }
                let target = g.index_of(&z).unwrap();
                for i in 0..v.components() {
                    let mut acc = Complex64::default();
                    for j in 0..2 {
                        let ik = if mb.nyquist[j] { 0.0 } else { mb.k[j] };
                        acc += u.coeffs()[j * n + ia] * Complex64::new(0.0, ik) * v.coeffs()[i * n + ib];
                    }
                    out.coeffs_mut()[i * n + target] += acc;
                }
            }
        }
        out
    }

    #[test]
    fn advection_matches_direct_convolution() {
        let g = Grid::periodic(2, 8).unwrap();
        let u = random_field(g, 2, 3, 5);
        let v = random_field(g, 2, 3, 6);
        let pl = PowerLaw::new(1.0, 2).unwrap();
        let got = convective_term(&u, &v, &pl).unwrap();
        let expect = direct_advection(&u, &v);
        assert!(got.sub(&expect).unwrap().max_abs_coeff() < 1e-12);
    }

    #[test]
    fn product_of_sines() {
        let g = Grid::periodic(2, 16).unwrap();
        let f = SpectralField::from_fn(g, 1, |x| [x[0].sin(), 0.0, 0.0]);
        let h = SpectralField::from_fn(g, 1, |x| [(3.0 * x[1]).cos(), 0.0, 0.0]);
        let p = pointwise_product(&f, &h, 2).unwrap().to_physical();
        for idx in 0..g.points() {
            let x = g.position(idx);
            assert!((p.values()[idx] - x[0].sin() * (3.0 * x[1]).cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn shared_gradient_matches_single() {
        let g = Grid::periodic(2, 16).unwrap();
        let (u, w, v) = (random_field(g, 2, 4, 1), random_field(g, 2, 4, 2), random_field(g, 2, 4, 3));
        let pl = PowerLaw::new(1.5, 2).unwrap();
        let both = convective_terms(&[&u, &w], &v, &pl).unwrap();
        assert_eq!(both[0], convective_term(&u, &v, &pl).unwrap());
        assert_eq!(both[1], convective_term(&w, &v, &pl).unwrap());
    }

    #[test]
    fn constant_v_gives_zero() {
        let g = Grid::periodic(2, 16).unwrap();
        let u = random_field(g, 2, 4, 8);
        let v = SpectralField::from_fn(g, 2, |_| [1.0, -2.0, 0.0]);
        let out = convective_term(&u, &v, &PowerLaw::new(1.5, 2).unwrap()).unwrap();
        assert!(out.max_abs_coeff() < 1e-14);
    }

    #[test]
    fn taylor_green_convection_is_gradient() {
        let g = Grid::periodic(2, 32).unwrap();
        let tg = SpectralField::from_fn(g, 2, |x| {
            [x[0].sin() * x[1].cos(), -x[0].cos() * x[1].sin(), 0.0]
        });
        let c = convective_term(&tg, &tg, &PowerLaw::new(1.0, 2).unwrap()).unwrap();
        assert!(leray_project(&c).unwrap().l2_norm() < 1e-10);
        // u·∇u = ∇(-(cos 2x + cos 2y)/4)
        let phys = c.to_physical();
        for idx in 0..g.points() {
            let x = g.position(idx);
            assert!((phys.component(0)[idx] - (2.0 * x[0]).sin() / 2.0).abs() < 1e-12);
            assert!((phys.component(1)[idx] - (2.0 * x[1]).sin() / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_in_v() {
        let g = Grid::periodic(2, 16).unwrap();
        let u = random_field(g, 2, 4, 1);
        let v = random_field(g, 2, 4, 2);
        let w = random_field(g, 2, 4, 3);
        let pl = PowerLaw::new(2.5, 3).unwrap();
        let lhs = convective_term(&u, &v.axpy(-1.5, &w).unwrap(), &pl).unwrap();
        let rhs = convective_term(&u, &v, &pl)
            .unwrap()
            .axpy(-1.5, &convective_term(&u, &w, &pl).unwrap())
            .unwrap();
        assert!(lhs.sub(&rhs).unwrap().max_abs_coeff() < 1e-12);
    }

    #[test]
    fn grid_mismatch() {
        let a = SpectralField::zeros(Grid::periodic(2, 16).unwrap(), 2);
        let b = SpectralField::zeros(Grid::periodic(2, 32).unwrap(), 2);
        let pl = PowerLaw::new(1.0, 2).unwrap();
        assert!(matches!(convective_term(&a, &b, &pl), Err(Error::Shape(_))));
    }

    #[test]
    fn difference_bound_examples() {
        let r = pointwise_difference_bound(&[1.0, 2.0], &[1.0, 2.0], 1.7);
        assert_eq!(r.lhs, 0.0);
        assert!(r.ok);
        let r = pointwise_difference_bound(&[1.0, 0.0], &[0.0, 0.0], 2.0);
        assert_eq!((r.lhs, r.rhs, r.ok), (1.0, 2.0, true));
        let r = pointwise_difference_bound(&[4.0], &[1.0], 0.5);
        assert!((r.lhs - 1.0).abs() < 1e-15);
        assert!((r.rhs - 6.0 * 3f64.sqrt()).abs() < 1e-12);
        assert!(r.ok);
    }

    proptest! {
        #[test]
        fn difference_bound_holds(
            a in prop::collection::vec(-10.0f64..10.0, 3),
            b in prop::collection::vec(-10.0f64..10.0, 3),
            mi in 0usize..7,
        ) {
            let m = [0.3, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0][mi];
            prop_assert!(pointwise_difference_bound(&a, &b, m).ok);
        }
    }
}
