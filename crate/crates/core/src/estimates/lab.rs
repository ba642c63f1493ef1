//! Empirical constants of the product, power, smoothing and bilinear
//! estimates.
//!
//! Every inequality is sampled as `lhs <= C rhs`; the report keeps the ratios
//! `lhs / rhs` and summarises them by their maximum and median. Samples are
//! drawn from independent ChaCha streams keyed by the sample index, so the
//! result does not depend on how the samples are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::generator::{lab_grid, random_amplitudes, FieldGenerator};
use super::hypotheses::{HypothesisSet, Params};
use crate::besov::{besov_norm, lp_norm, BesovIndex, DyadicCutoff};
use crate::error::{Error, Result};
use crate::lorentz::{log_uniform_nodes, lorentz_norm, LorentzIndex, TimeSamples};
use crate::nonlinearity::{
    apply_power, convective_terms, pointwise_difference_bound, pointwise_product, PowerLaw,
};
use crate::report::num;
use crate::spectral::{evolve, fractional_laplacian, semigroup_apply, Grid, SpectralField};

const INF: f64 = f64::INFINITY;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InequalityId {
    Prod1,
    Prod2,
    PowSmall,
    Pow,
    Diff,
    Semi,
    MaxReg,
    Duhamel,
    BilinM1,
    Bilin,
    BilinDiff,
}

impl InequalityId {
    pub const ALL: [InequalityId; 11] = [
        InequalityId::Prod1,
        InequalityId::Prod2,
        InequalityId::PowSmall,
        InequalityId::Pow,
        InequalityId::Diff,
        InequalityId::Semi,
        InequalityId::MaxReg,
        InequalityId::Duhamel,
        InequalityId::BilinM1,
        InequalityId::Bilin,
        InequalityId::BilinDiff,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            InequalityId::Prod1 => "PROD1",
            InequalityId::Prod2 => "PROD2",
            InequalityId::PowSmall => "POW_SMALL",
            InequalityId::Pow => "POW",
            InequalityId::Diff => "DIFF",
            InequalityId::Semi => "SEMI",
            InequalityId::MaxReg => "MAXREG",
            InequalityId::Duhamel => "DUHAMEL",
            InequalityId::BilinM1 => "BILIN_M1",
            InequalityId::Bilin => "BILIN",
            InequalityId::BilinDiff => "BILIN_DIFF",
        }
    }

    /// Case-insensitive; `-` and `_` are interchangeable.
    pub fn parse(s: &str) -> Option<Self> {
        let key = s.trim().to_ascii_uppercase().replace('-', "_");
        Self::ALL.into_iter().find(|id| id.as_str() == key)
    }

    fn stream(&self) -> u64 {
        Self::ALL.iter().position(|x| x == self).unwrap_or(0) as u64 + 1
    }
}

impl std::fmt::Display for InequalityId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sampling parameters shared by all inequalities.
#[derive(Debug, Clone, PartialEq)]
pub struct LabConfig {
    pub samples: usize,
    pub seed: u64,
    /// Envelope exponent of the field generator.
    pub sigma: f64,
    /// Time nodes per trajectory.
    pub nodes: usize,
    pub horizon: f64,
    /// Power used for the `0 < m <= 1` estimate, where the hypothesis sets
    /// (all with `m >= 1`) have nothing to offer.
    pub small_power: f64,
    pub dealias: usize,
    /// Distinct spatial profiles a sampled trajectory moves between.
    pub pool: usize,
    /// Lattice for the sampled fields; [`lab_grid`] of the set's dimension
    /// when absent.
    pub grid: Option<Grid>,
}

impl Default for LabConfig {
    fn default() -> Self {
        Self {
            samples: 100,
            seed: 0,
            sigma: 1.0,
            nodes: 12,
            horizon: 1.0,
            small_power: 0.5,
            dealias: 2,
            pool: 2,
            grid: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub ineq_id: String,
    pub hypothesis_label: String,
    pub params: Params,
    pub samples: usize,
    #[serde(serialize_with = "num")]
    pub max_ratio: f64,
    #[serde(serialize_with = "num")]
    pub median_ratio: f64,
    pub violations: usize,
    pub skipped: usize,
    /// `(lhs, rhs)` per sample, constant omitted.
    #[serde(skip)]
    pub pairs: Vec<(f64, f64)>,
}

impl InequalityReport {
    fn summarise(
        ineq_id: &str,
        label: &str,
        params: Params,
        pairs: Vec<(f64, f64)>,
        violations: usize,
    ) -> Result<Self> {
        let mut ratios = Vec::with_capacity(pairs.len());
        let mut skipped = 0;
        for &(lhs, rhs) in &pairs {
            if !(rhs > 0.0) || !rhs.is_finite() {
                skipped += 1;
                continue;
            }
            let q = lhs / rhs;
            if !q.is_finite() {
                return Err(Error::Consistency(format!(
                    "{ineq_id}: non-finite ratio {lhs} / {rhs}"
                )));
            }
            ratios.push(q);
        }
        ratios.sort_by(f64::total_cmp);
        let max_ratio = ratios.last().copied().unwrap_or(0.0);
        let median_ratio = match ratios.len() {
            0 => 0.0,
            k if k % 2 == 1 => ratios[k / 2],
            k => 0.5 * (ratios[k / 2 - 1] + ratios[k / 2]),
        };
        Ok(Self {
            ineq_id: ineq_id.to_string(),
            hypothesis_label: label.to_string(),
            params,
            samples: pairs.len(),
            max_ratio,
            median_ratio,
            violations,
            skipped,
            pairs,
        })
    }
}

struct Lab<'a> {
    h: &'a HypothesisSet,
    cfg: &'a LabConfig,
    grid: Grid,
    scalars: FieldGenerator,
    vectors: FieldGenerator,
    solenoidal: FieldGenerator,
    power: PowerLaw,
    nodes: Vec<f64>,
}

impl Lab<'_> {
    fn cutoff(&self) -> &DyadicCutoff {
        self.scalars.cutoff()
    }

    fn bn(&self, f: &SpectralField, s: f64, p: f64, r: f64) -> Result<f64> {
        besov_norm(f, &BesovIndex::new(s, p, r)?, self.cutoff())
    }

    fn lorentz(&self, values: Vec<f64>, rho: f64) -> Result<f64> {
        let ts = TimeSamples::new(self.nodes.clone(), values)?;
        lorentz_norm(&ts, &LorentzIndex::new(rho, self.h.r)?, self.cfg.horizon)
    }

    fn with_zero(&self) -> Vec<f64> {
        std::iter::once(0.0).chain(self.nodes.iter().copied()).collect()
    }

    /// Piecewise-constant forcing `c_j F_{π_j}` on `(t_{j-1}, t_j]`.
    fn forcing<R: Rng>(&self, rng: &mut R) -> Result<Vec<SpectralField>> {
        let pool = (0..self.cfg.pool.max(1))
            .map(|_| self.vectors.sample(rng))
            .collect::<Result<Vec<_>>>()?;
        let amps = random_amplitudes(self.nodes.len(), rng);
        Ok(amps
            .iter()
            .map(|&c| pool[rng.random_range(0..pool.len())].scaled(c))
            .collect())
    }

    fn pair<R: Rng>(&self, id: InequalityId, rng: &mut R) -> Result<(f64, f64)> {
        let h = self.h;
        let (n, p, r, alpha) = (h.n as f64, h.p, h.r, h.alpha);
        let m = h.m;
        match id {
            InequalityId::Prod1 | InequalityId::Prod2 => {
                let (sig, delta, q) = (n / (2.0 * p), 0.5, 2.0 * p);
                let f = self.scalars.sample(rng)?;
                let g = self.scalars.sample(rng)?;
                let lhs = self.bn(&pointwise_product(&f, &g, self.cfg.dealias)?, sig, p, r)?;
                let rhs = if id == InequalityId::Prod1 {
                    self.bn(&f, sig + delta, q, r)? * self.bn(&g, -delta, q, INF)?
                        + self.bn(&f, -delta, q, INF)? * self.bn(&g, sig + delta, q, r)?
                } else {
                    self.bn(&f, sig, q, r)? * lp_norm(&g, q) + lp_norm(&f, q) * self.bn(&g, sig, q, r)?
                };
                Ok((lhs, rhs))
            }
            InequalityId::PowSmall => {
                let mu = self.cfg.small_power;
                let sig = mu / 2.0;
                let f = self.vectors.sample(rng)?;
                let jf = apply_power(&f, &PowerLaw::new(mu, self.cfg.dealias)?)?;
                let lhs = self.bn(&jf, sig, p, r)?;
                let rhs = self.bn(&f, sig / mu, mu * p, mu * r)?.powf(mu);
                Ok((lhs, rhs))
            }
            InequalityId::Pow => {
                let sig = m.min(n / p) / 2.0;
                let f = self.vectors.sample(rng)?;
                let lhs = self.bn(&apply_power(&f, &self.power)?, sig, p, r)?;
                let rhs = self
                    .bn(&f, sig / m + (1.0 - 1.0 / m) * n / p, p, r)?
                    .powf(m);
                Ok((lhs, rhs))
            }
            InequalityId::Diff => {
                let (sig, r0) = h.difference_exponents()?;
                let x = sig / m + (1.0 - 1.0 / m) * n / p;
                let f = self.vectors.sample(rng)?;
                let eps = random_amplitudes(1, rng)[0];
                let g = f.axpy(eps, &self.vectors.sample(rng)?)?;
                let jdiff = apply_power(&f, &self.power)?.sub(&apply_power(&g, &self.power)?)?;
                let lhs = self.bn(&jdiff, sig, p, r)?;
                let rhs = (self.bn(&f, x, p, r0)?.powf(m - 1.0) + self.bn(&g, x, p, r0)?.powf(m - 1.0))
                    * self.bn(&f.sub(&g)?, x, p, r0)?;
                Ok((lhs, rhs))
            }
            InequalityId::Semi => {
                let a = self.vectors.sample(rng)?;
                semigroup_pair(&a, h, &self.nodes, self.cfg.horizon, self.cutoff())
            }
            InequalityId::MaxReg => {
                let a = self.vectors.sample(rng)?;
                let held = self.forcing(rng)?;
                let u = evolve(&a, &self.with_zero(), &held, alpha)?;
                let mut du = Vec::with_capacity(held.len());
                let mut lap = Vec::with_capacity(held.len());
                let mut fv = Vec::with_capacity(held.len());
                for (uj, fj) in u[1..].iter().zip(&held) {
                    let l = fractional_laplacian(uj, alpha)?;
                    du.push(self.bn(&fj.sub(&l)?, h.s, p, r)?);
                    lap.push(self.bn(&l, h.s, p, r)?);
                    fv.push(self.bn(fj, h.s, p, r)?);
                }
                let lhs = self.lorentz(du, h.rho)? + self.lorentz(lap, h.rho)?;
                let rhs = self.bn(&a, h.s0, h.p0, r)? + self.lorentz(fv, h.rho)?;
                Ok((lhs, rhs))
            }
            InequalityId::Duhamel => {
                let held = self.forcing(rng)?;
                let zero = SpectralField::zeros(self.grid, held[0].components());
                let u = evolve(&zero, &self.with_zero(), &held, alpha)?;
                let mut sv = Vec::with_capacity(held.len());
                let mut fv = Vec::with_capacity(held.len());
                for (uj, fj) in u[1..].iter().zip(&held) {
                    sv.push(self.bn(uj, h.s + 2.0 * alpha, p, 1.0)?);
                    fv.push(self.bn(fj, h.s_tilde, p, INF)?);
                }
                Ok((self.lorentz(sv, h.rho)?, self.lorentz(fv, h.rho_tilde)?))
            }
            InequalityId::BilinM1 | InequalityId::Bilin => {
                let (target_rho, q) = if id == InequalityId::BilinM1 {
                    (h.rho / 2.0, 1.0)
                } else {
                    (h.rho_tilde, INF)
                };
                let k = self.cfg.pool.max(1);
                let mut x = Vec::with_capacity(k);
                let mut un = Vec::with_capacity(k);
                let mut vn = Vec::with_capacity(k);
                for _ in 0..k {
                    let u = self.solenoidal.sample(rng)?;
                    let v = self.solenoidal.sample(rng)?;
                    let c = convective_terms(&[&u], &v, &self.power)?.remove(0);
                    x.push(self.bn(&c, h.s_tilde, p, INF)?);
                    un.push(self.bn(&u, h.s + 2.0 * alpha, p, q)?);
                    vn.push(self.bn(&v, h.s + 2.0 * alpha, p, q)?);
                }
                let c = random_amplitudes(self.nodes.len(), rng);
                let d = random_amplitudes(self.nodes.len(), rng);
                let pick: Vec<usize> = (0..self.nodes.len()).map(|_| rng.random_range(0..k)).collect();
                let lhs_v = (0..self.nodes.len())
                    .map(|j| c[j].powf(m) * d[j] * x[pick[j]])
                    .collect();
                let u_v = (0..self.nodes.len()).map(|j| c[j] * un[pick[j]]).collect();
                let v_v = (0..self.nodes.len()).map(|j| d[j] * vn[pick[j]]).collect();
                let lhs = self.lorentz(lhs_v, target_rho)?;
                let rhs = self.lorentz(u_v, h.rho)?.powf(m) * self.lorentz(v_v, h.rho)?;
                Ok((lhs, rhs))
            }
            InequalityId::BilinDiff => {
                let k = self.cfg.pool.max(1);
                let sreg = h.s + 2.0 * alpha;
                let mut profiles = Vec::with_capacity(k);
                for _ in 0..k {
                    let u = self.solenoidal.sample(rng)?;
                    let eps = random_amplitudes(1, rng)[0];
                    let w = u.axpy(eps, &self.solenoidal.sample(rng)?)?;
                    let v = self.solenoidal.sample(rng)?;
                    let mut terms = convective_terms(&[&u, &w], &v, &self.power)?;
                    let b = terms.pop().expect("two terms");
                    let a = terms.pop().expect("two terms");
                    let norms = (self.bn(&u, sreg, p, 1.0)?, self.bn(&w, sreg, p, 1.0)?, self.bn(&v, sreg, p, 1.0)?);
                    profiles.push((u, w, a, b, norms));
                }
                let len = self.nodes.len();
                let c = random_amplitudes(len, rng);
                let c2: Vec<f64> = c.iter().map(|&x| x * (1.0 + 0.4 * (rng.random::<f64>() - 0.5))).collect();
                let d = random_amplitudes(len, rng);
                let (mut lhs_v, mut n1, mut n2, mut nd, mut nv) =
                    (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new());
                for j in 0..len {
                    let (u, w, a, b, (nu, nw, nvv)) = &profiles[rng.random_range(0..k)];
                    let node = a.scaled(c[j].powf(m)).axpy(-c2[j].powf(m), b)?.scaled(d[j]);
                    lhs_v.push(self.bn(&node, h.s_tilde, p, INF)?);
                    n1.push(c[j] * nu);
                    n2.push(c2[j] * nw);
                    nd.push(self.bn(&u.scaled(c[j]).axpy(-c2[j], w)?, sreg, p, 1.0)?);
                    nv.push(d[j] * nvv);
                }
                let lhs = self.lorentz(lhs_v, h.rho_tilde)?;
                let rhs = (self.lorentz(n1, h.rho)?.powf(m - 1.0) + self.lorentz(n2, h.rho)?.powf(m - 1.0))
                    * self.lorentz(nd, h.rho)?
                    * self.lorentz(nv, h.rho)?;
                Ok((lhs, rhs))
            }
        }
    }
}

/// `(‖e^{-t(-Δ)^α} a‖_{L^{ρ,r}(Ḃ^{s+2α}_{p,1})}, ‖a‖_{Ḃ^{s0}_{p0,r}})`, the
/// trajectory sampled at `nodes`.
pub fn semigroup_pair(
    a: &SpectralField,
    h: &HypothesisSet,
    nodes: &[f64],
    horizon: f64,
    cutoff: &DyadicCutoff,
) -> Result<(f64, f64)> {
    let idx = BesovIndex::new(h.s + 2.0 * h.alpha, h.p, 1.0)?;
    let values = nodes
        .iter()
        .map(|&t| besov_norm(&semigroup_apply(a, t, h.alpha)?, &idx, cutoff))
        .collect::<Result<Vec<_>>>()?;
    let lhs = lorentz_norm(
        &TimeSamples::new(nodes.to_vec(), values)?,
        &LorentzIndex::new(h.rho, h.r)?,
        horizon,
    )?;
    let rhs = besov_norm(a, &BesovIndex::new(h.s0, h.p0, h.r)?, cutoff)?;
    Ok((lhs, rhs))
}

fn side_conditions(id: InequalityId, h: &HypothesisSet, cfg: &LabConfig) -> Result<()> {
    let fail = |msg: String| Err(Error::Validation(vec![msg]));
    match id {
        InequalityId::PowSmall => {
            let mu = cfg.small_power;
            if !(mu > 0.0 && mu <= 1.0) {
                return fail(format!("0 < m ≤ 1 violated for the small power {mu}"));
            }
            if h.p < 1.0 / mu || h.r < 1.0 / mu {
                return fail(format!("1/m ≤ p, r violated (1/m = {})", 1.0 / mu));
            }
        }
        InequalityId::Pow => {
            if !(h.p > 1.0) || h.r > 2f64.min(h.p) {
                return fail(format!("1 ≤ r ≤ min{{2, p}} violated (r = {})", h.r));
            }
        }
        InequalityId::Diff | InequalityId::BilinDiff => {
            h.difference_exponents()?;
        }
        InequalityId::BilinM1 => {
            if h.m != 1.0 {
                return fail(format!("m = 1 violated (m = {})", h.m));
            }
        }
        InequalityId::Bilin => {
            if h.m <= 1.0 {
                return fail(format!("m > 1 violated (m = {})", h.m));
            }
        }
        InequalityId::Prod1
        | InequalityId::Prod2
        | InequalityId::Semi
        | InequalityId::MaxReg
        | InequalityId::Duhamel => {}
    }
    Ok(())
}

/// Samples `cfg.samples` instances of inequality `id` under `h`.
pub fn estimate_constant(
    id: InequalityId,
    h: &HypothesisSet,
    cfg: &LabConfig,
) -> Result<InequalityReport> {
    if cfg.samples < 10 {
        return Err(Error::Parameter(format!(
            "need at least 10 samples, got {}",
            cfg.samples
        )));
    }
    if cfg.nodes < 2 || !(cfg.horizon > 0.0) {
        return Err(Error::Parameter("trajectories need >= 2 nodes and T > 0".into()));
    }
    side_conditions(id, h, cfg)?;
    let grid = match cfg.grid {
        Some(g) => g,
        None => lab_grid(h.n)?,
    };
    if grid.dim() != h.n {
        return Err(Error::Shape(format!(
            "lab grid has dimension {}, hypotheses {}",
            grid.dim(),
            h.n
        )));
    }
    let lab = Lab {
        h,
        cfg,
        grid,
        scalars: FieldGenerator::new(grid, cfg.sigma, 1, false)?,
        vectors: FieldGenerator::new(grid, cfg.sigma, h.n, false)?,
        solenoidal: FieldGenerator::new(grid, cfg.sigma, h.n, true)?,
        power: PowerLaw::new(h.m, cfg.dealias)?,
        nodes: log_uniform_nodes(cfg.horizon, cfg.nodes),
    };
    let pairs = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream((id.stream() << 32) | i as u64);
            lab.pair(id, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut params = Params::of(h);
    params.push("seed", cfg.seed as f64);
    params.push("sigma", cfg.sigma);
    params.push("nodes", cfg.nodes as f64);
    params.push("horizon", cfg.horizon);
    params.push("grid_size", grid.size() as f64);
    params.push("box_length", grid.length());
    if id == InequalityId::PowSmall {
        params.push("small_power", cfg.small_power);
    }
    InequalityReport::summarise(id.as_str(), h.label.as_str(), params, pairs, 0)
}

/// Random check of the pointwise bounds on `J_m(a) - J_m(b)` with
/// `|a|, |b| <= 10`, `n ∈ {2, 3}` and `m ∈ {0.3, 0.5, 1, 1.5, 2, 3, 4}`.
pub fn lemma_ab(samples: usize, seed: u64) -> Result<InequalityReport> {
    const POWERS: [f64; 7] = [0.3, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(samples);
    let mut violations = 0;
    let point = |rng: &mut ChaCha8Rng, n: usize| -> Vec<f64> {
        let v: Vec<f64> = (0..n).map(|_| rand_distr::Distribution::sample(&rand_distr::StandardNormal, rng)).collect();
        let len = v.iter().map(|x: &f64| x * x).sum::<f64>().sqrt().max(1e-300);
        let radius = 10.0 * rng.random::<f64>();
        v.into_iter().map(|x| x * radius / len).collect()
    };
    for _ in 0..samples {
        let n = if rng.random::<bool>() { 2 } else { 3 };
        let m = POWERS[rng.random_range(0..POWERS.len())];
        let a = point(&mut rng, n);
        let b = match rng.random_range(0..10) {
            // Nearby and antipodal pairs probe the two ends of the bound.
            0 => a.iter().map(|x| x * (1.0 + 1e-3 * rng.random::<f64>())).collect(),
            1 => a.iter().map(|x| -x).collect(),
            _ => point(&mut rng, n),
        };
        let res = pointwise_difference_bound(&a, &b, m);
        if !res.ok {
            violations += 1;
        }
        pairs.push((res.lhs, res.rhs));
    }
    let mut params = Params::default();
    params.push("seed", seed as f64);
    params.push("radius", 10.0);
    InequalityReport::summarise("LEMMA_AB", "none", params, pairs, violations)
}
