//! Mild solutions by Picard iteration on
//! `Φ(u) = a_L + S(Pf - P(J_m(u)·∇u))`.
//!
//! Trajectories live on the nodes `0 = t_0 < t_1 < ... < t_J = T`, with
//! `t_1..t_J` log-uniform. The Duhamel integral holds its integrand at the
//! left endpoint of each interval and is otherwise exact per mode. Time norms
//! treat the node values as a step function, the value at `t_j` standing for
//! `(t_{j-1}, t_j]`.

mod gate;

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

pub use gate::{gate_arithmetic, Constants, ConstantsMode, GateVerdict};

use crate::besov::{besov_norm, build_cutoff, BesovIndex, DyadicCutoff};
use crate::error::{Error, Result};
use crate::estimates::{HypothesisSet, Params};
use crate::lorentz::{log_uniform_nodes, lorentz_norm, LorentzIndex, TimeSamples};
use crate::nonlinearity::{convective_term, PowerLaw};
use crate::report::{nums, opt_num};
use crate::spectral::{divergence, evolve, fractional_laplacian, leray_project, Grid, SpectralField};

/// Divergence tolerance for data and iterates, relative to `1 + ‖u‖ k_max`.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-10;

/// Measurement slack on `‖u‖ <= 2 K0`.
pub const APRIORI_SLACK: f64 = 1.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GatePolicy {
    Warn,
    Abort,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Start {
    /// `u_0 = a_L + S(Pf)`.
    Linear,
    Zero,
}

/// Time difference used by [`residual_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualScheme {
    /// `(u_j - u_{j-1}) / Δt`.
    Backward,
    /// Replaces `∂_t + (-Δ)^α` by the difference quotient that is exact for
    /// forcing constant on each interval:
    /// `λ (u_j - e^{-Δt λ} u_{j-1}) / (1 - e^{-Δt λ})` per mode.
    Fitted,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub hypothesis: HypothesisSet,
    pub grid: Grid,
    pub horizon: f64,
    /// Positive nodes `t_1..t_J`; `t_0 = 0` is added.
    pub nodes: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub constants: ConstantsMode,
    pub power: PowerLaw,
    pub gate_policy: GatePolicy,
    /// Project non-solenoidal data instead of rejecting it.
    pub project_data: bool,
}

impl SolverConfig {
    pub fn new(hypothesis: HypothesisSet, grid: Grid) -> Result<Self> {
        let power = PowerLaw::new(hypothesis.m, 2)?;
        Ok(Self {
            hypothesis,
            grid,
            horizon: 1.0,
            nodes: 64,
            tolerance: 1e-10,
            max_iterations: 50,
            constants: ConstantsMode::Supplied {
                k0: 1.0,
                k1: 1.0,
                k2: 1.0,
            },
            power,
            gate_policy: GatePolicy::Warn,
            project_data: false,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::Config(format!("tolerance must be > 0, got {}", self.tolerance)));
        }
        if self.max_iterations < 1 {
            return Err(Error::Config("at least one iteration is needed".into()));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Config(format!("horizon must be > 0, got {}", self.horizon)));
        }
        if self.nodes < 2 {
            return Err(Error::Config(format!("need >= 2 time nodes, got {}", self.nodes)));
        }
        if self.grid.dim() != self.hypothesis.n {
            return Err(Error::Config(format!(
                "grid dimension {} differs from n = {}",
                self.grid.dim(),
                self.hypothesis.n
            )));
        }
        if self.power.m() != self.hypothesis.m {
            return Err(Error::Config(format!(
                "power law m = {} differs from the hypothesis m = {}",
                self.power.m(),
                self.hypothesis.m
            )));
        }
        if let ConstantsMode::Supplied { k0, k1, k2 } = self.constants {
            Constants::supplied(k0, k1, k2)?;
        }
        self.hypothesis.require_solver_range()
    }

    pub fn times(&self) -> Vec<f64> {
        std::iter::once(0.0)
            .chain(log_uniform_nodes(self.horizon, self.nodes))
            .collect()
    }
}

/// External force: absent, constant in time, or one field per node `t_0..t_J`.
#[derive(Debug, Clone, PartialEq)]
pub enum Forcing {
    Zero,
    Constant(SpectralField),
    Nodes(Vec<SpectralField>),
}

impl Forcing {
    fn check(&self, cfg: &SolverConfig, like: &SpectralField) -> Result<()> {
        match self {
            Forcing::Zero => Ok(()),
            Forcing::Constant(f) => like.same_shape(f),
            Forcing::Nodes(fs) => {
                if fs.len() != cfg.nodes + 1 {
                    return Err(Error::Shape(format!(
                        "forcing has {} nodes, expected {}",
                        fs.len(),
                        cfg.nodes + 1
                    )));
                }
                fs.iter().try_for_each(|f| like.same_shape(f))
            }
        }
    }

    /// Value at node `j`, `None` when zero.
    pub fn at(&self, j: usize) -> Option<&SpectralField> {
        match self {
            Forcing::Zero => None,
            Forcing::Constant(f) => Some(f),
            Forcing::Nodes(fs) => fs.get(j),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub velocity: Vec<SpectralField>,
    pub pressure_gradient: Option<Vec<SpectralField>>,
}

/// Spatial norms of one node of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodeNorms {
    pub t: f64,
    /// `‖u‖_{Ḃ^{s+2α}_{p,1}}`
    pub b_s_2a_p_1: f64,
    /// `‖u‖_{Ḃ^{s̃+2α}_{p,∞}}`
    pub b_st_2a_p_inf: f64,
    /// `‖u‖_{Ḃ^{s̃}_{p,∞}}`
    pub b_st_p_inf: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn norm_table(&self, h: &HypothesisSet) -> Result<Vec<NodeNorms>> {
        let Some(u0) = self.velocity.first() else {
            return Ok(Vec::new());
        };
        let cutoff = build_cutoff(u0.grid())?;
        let a = BesovIndex::new(h.s + 2.0 * h.alpha, h.p, 1.0)?;
        let b = BesovIndex::new(h.s_tilde + 2.0 * h.alpha, h.p, f64::INFINITY)?;
        let c = BesovIndex::new(h.s_tilde, h.p, f64::INFINITY)?;
        self.times
            .par_iter()
            .zip(&self.velocity)
            .map(|(&t, u)| {
                Ok(NodeNorms {
                    t,
                    b_s_2a_p_1: besov_norm(u, &a, &cutoff)?,
                    b_st_2a_p_inf: besov_norm(u, &b, &cutoff)?,
                    b_st_p_inf: besov_norm(u, &c, &cutoff)?,
                })
            })
            .collect()
    }

    pub fn write_norm_csv(&self, h: &HypothesisSet, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for row in self.norm_table(h)? {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Picard history, constants and the smallness verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionDiagnostics {
    #[serde(flatten)]
    pub verdict: GateVerdict,
    pub constants: Constants,
    pub iterations: usize,
    pub converged: bool,
    #[serde(serialize_with = "nums")]
    pub d_k: Vec<f64>,
    #[serde(serialize_with = "nums")]
    pub ratios: Vec<f64>,
    /// `‖u‖_{L^{ρ,r}_T(Ḃ^{s+2α}_{p,1})}` against `2K0`.
    pub apriori_bound_holds: Option<bool>,
    #[serde(serialize_with = "opt_num")]
    pub residual: Option<f64>,
    pub norms: Params,
}

impl ContractionDiagnostics {
    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(crate::report::to_json_pretty(self)?.as_bytes())?;
        f.write_all(b"\n")?;
        Ok(())
    }
}

struct Context {
    cutoff: DyadicCutoff,
    times: Vec<f64>,
}

impl Context {
    fn new(cfg: &SolverConfig) -> Result<Self> {
        Ok(Self {
            cutoff: build_cutoff(&cfg.grid)?,
            times: cfg.times(),
        })
    }

    /// `‖·‖_{L^{ρ,r}_T(Ḃ^{s+2α}_{p,1})}` over nodes `t_1..t_J`.
    fn solution_norm(&self, u: &[SpectralField], h: &HypothesisSet, horizon: f64) -> Result<f64> {
        let idx = BesovIndex::new(h.s + 2.0 * h.alpha, h.p, 1.0)?;
        let values = u[1..]
            .par_iter()
            .map(|f| besov_norm(f, &idx, &self.cutoff))
            .collect::<Result<Vec<_>>>()?;
        self.time_norm(values, h.rho, h, horizon)
    }

    fn time_norm(&self, values: Vec<f64>, rho: f64, h: &HypothesisSet, horizon: f64) -> Result<f64> {
        let ts = TimeSamples::new(self.times[1..].to_vec(), values)?;
        lorentz_norm(&ts, &LorentzIndex::new(rho, h.r)?, horizon)
    }

    /// `‖f‖_{L^{ρ̃,r}_T(Ḃ^{s̃}_{p,∞})}`, the value on `(t_{j-1}, t_j]` being `f(t_{j-1})`.
    fn forcing_norm(&self, f: &Forcing, h: &HypothesisSet, horizon: f64) -> Result<f64> {
        let idx = BesovIndex::new(h.s_tilde, h.p, f64::INFINITY)?;
        let values = (0..self.times.len() - 1)
            .into_par_iter()
            .map(|j| match f.at(j) {
                Some(g) => besov_norm(g, &idx, &self.cutoff),
                None => Ok(0.0),
            })
            .collect::<Result<Vec<_>>>()?;
        self.time_norm(values, h.rho_tilde, h, horizon)
    }
}

fn divergence_free(u: &SpectralField) -> Result<bool> {
    let scale = 1.0 + u.l2_norm() * u.grid().nyquist_wavenumber();
    Ok(divergence(u)?.l2_norm() <= DIVERGENCE_TOLERANCE * scale)
}

fn prepare_data(a: &SpectralField, cfg: &SolverConfig) -> Result<SpectralField> {
    if a.grid() != &cfg.grid || !a.is_vector() {
        return Err(Error::Shape(format!(
            "initial field must be a {}-component field on the solver grid",
            cfg.grid.dim()
        )));
    }
    if divergence_free(a)? {
        Ok(a.clone())
    } else if cfg.project_data {
        leray_project(a)
    } else {
        Err(Error::Validation(vec![
            "initial field is not divergence-free".to_string(),
        ]))
    }
}

/// `u(t_j) = e^{-t_j(-Δ)^α} a` at every node.
pub fn linear_part(a: &SpectralField, cfg: &SolverConfig) -> Result<Trajectory> {
    let a = prepare_data(a, cfg)?;
    let times = cfg.times();
    let velocity = times
        .par_iter()
        .map(|&t| crate::spectral::semigroup_apply(&a, t, cfg.hypothesis.alpha))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        times,
        velocity,
        pressure_gradient: None,
    })
}

/// `S g` at every node, `g` given at `t_0..t_J` and held at the left
/// endpoint of each interval.
pub fn duhamel_apply(g: &[SpectralField], cfg: &SolverConfig) -> Result<Trajectory> {
    let times = cfg.times();
    if g.len() != times.len() {
        return Err(Error::Shape(format!(
            "forcing sampled on {} nodes, the configuration has {}",
            g.len(),
            times.len()
        )));
    }
    let zero = SpectralField::zeros(*g[0].grid(), g[0].components());
    let velocity = evolve(&zero, &times, &g[..g.len() - 1], cfg.hypothesis.alpha)?;
    Ok(Trajectory {
        times,
        velocity,
        pressure_gradient: None,
    })
}

/// `f(t_j) - J_m(u(t_j))·∇u(t_j)` at every node.
fn momentum_source(u: &[SpectralField], f: &Forcing, power: &PowerLaw) -> Result<Vec<SpectralField>> {
    u.par_iter()
        .enumerate()
        .map(|(j, uj)| {
            let n = convective_term(uj, uj, power)?;
            match f.at(j) {
                Some(fj) => fj.sub(&n),
                None => Ok(n.scaled(-1.0)),
            }
        })
        .collect()
}

fn first_blowup(u: &[SpectralField], times: &[f64]) -> Result<()> {
    match u.iter().position(|f| !f.is_finite()) {
        Some(node) => Err(Error::Blowup {
            node,
            time: times[node],
        }),
        None => Ok(()),
    }
}

fn phi_velocity(
    u: &[SpectralField],
    a: &SpectralField,
    f: &Forcing,
    cfg: &SolverConfig,
    times: &[f64],
) -> Result<Vec<SpectralField>> {
    let held = momentum_source(&u[..u.len() - 1], f, &cfg.power)?
        .par_iter()
        .map(leray_project)
        .collect::<Result<Vec<_>>>()?;
    let out = evolve(a, times, &held, cfg.hypothesis.alpha)?;
    first_blowup(&out, times)?;
    Ok(out)
}

/// One application of the mild-formulation map.
pub fn phi_map(u: &Trajectory, a: &SpectralField, f: &Forcing, cfg: &SolverConfig) -> Result<Trajectory> {
    let a = prepare_data(a, cfg)?;
    f.check(cfg, &a)?;
    let times = cfg.times();
    if u.times != times {
        return Err(Error::Shape("trajectory nodes differ from the configuration".into()));
    }
    Ok(Trajectory {
        velocity: phi_velocity(&u.velocity, &a, f, cfg, &times)?,
        times,
        pressure_gradient: None,
    })
}

/// `K0 = k0 ‖a‖_{Ḃ^{s0}_{p0,r}} + k1 ‖f‖_{L^{ρ̃,r}_T(Ḃ^{s̃}_{p,∞})}` and the
/// verdict it implies.
pub fn smallness_gate(
    a: &SpectralField,
    f: &Forcing,
    cfg: &SolverConfig,
    constants: &Constants,
) -> Result<ContractionDiagnostics> {
    cfg.validate()?;
    let a = prepare_data(a, cfg)?;
    f.check(cfg, &a)?;
    let ctx = Context::new(cfg)?;
    let h = &cfg.hypothesis;
    let a_norm = besov_norm(&a, &BesovIndex::new(h.s0, h.p0, h.r)?, &ctx.cutoff)?;
    let f_norm = ctx.forcing_norm(f, h, cfg.horizon)?;
    let verdict = gate_arithmetic(constants.k0 * a_norm + constants.k1 * f_norm, constants.k2)?;
    let mut norms = Params::default();
    norms.push("a_initial", a_norm);
    norms.push("f_forcing", f_norm);
    Ok(ContractionDiagnostics {
        verdict,
        constants: *constants,
        iterations: 0,
        converged: false,
        d_k: Vec::new(),
        ratios: Vec::new(),
        apriori_bound_holds: None,
        residual: None,
        norms,
    })
}

/// Iterates `u_{k+1} = Φ(u_k)` until the update drops below the tolerance.
pub fn picard_solve(
    a: &SpectralField,
    f: &Forcing,
    cfg: &SolverConfig,
) -> Result<(Trajectory, ContractionDiagnostics)> {
    picard_solve_from(a, f, cfg, Start::Linear)
}

pub fn picard_solve_from(
    a: &SpectralField,
    f: &Forcing,
    cfg: &SolverConfig,
    start: Start,
) -> Result<(Trajectory, ContractionDiagnostics)> {
    cfg.validate()?;
    let constants = Constants::resolve(&cfg.constants, &cfg.hypothesis, cfg.grid)?;
    picard_solve_with(a, f, cfg, start, &constants)
}

/// [`picard_solve_from`] with constants resolved beforehand.
pub fn picard_solve_with(
    a: &SpectralField,
    f: &Forcing,
    cfg: &SolverConfig,
    start: Start,
    constants: &Constants,
) -> Result<(Trajectory, ContractionDiagnostics)> {
    let mut diag = smallness_gate(a, f, cfg, constants)?;
    if !diag.verdict.gate && cfg.gate_policy == GatePolicy::Abort {
        return Err(Error::Gate(diag.verdict.reason.clone().unwrap_or_default()));
    }
    let a = prepare_data(a, cfg)?;
    let ctx = Context::new(cfg)?;
    let h = &cfg.hypothesis;
    let times = &ctx.times;

    let mut u = match start {
        Start::Linear => {
            let zero = vec![SpectralField::zeros(cfg.grid, a.components()); times.len()];
            let held = (0..times.len() - 1)
                .map(|j| match f.at(j) {
                    Some(fj) => leray_project(fj),
                    None => Ok(zero[j].clone()),
                })
                .collect::<Result<Vec<_>>>()?;
            evolve(&a, times, &held, h.alpha)?
        }
        Start::Zero => vec![SpectralField::zeros(cfg.grid, a.components()); times.len()],
    };
    let mut updates = Vec::new();
    let mut converged = false;
    for _ in 0..cfg.max_iterations {
        let next = phi_velocity(&u, &a, f, cfg, times)?;
        let diff: Vec<SpectralField> = next
            .iter()
            .zip(&u)
            .map(|(x, y)| x.sub(y))
            .collect::<Result<_>>()?;
        let d = ctx.solution_norm(&diff, h, cfg.horizon)?;
        updates.push(d);
        u = next;
        if d < cfg.tolerance {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Divergence {
            iterations: updates.len(),
            last: updates.last().copied().unwrap_or(f64::NAN),
            updates,
        });
    }

    let u_norm = ctx.solution_norm(&u, h, cfg.horizon)?;
    diag.norms.push("u_solution", u_norm);
    diag.iterations = updates.len();
    diag.converged = true;
    diag.ratios = updates
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 })
        .collect();
    diag.d_k = updates;
    diag.apriori_bound_holds = Some(u_norm <= 2.0 * diag.verdict.k_zero * APRIORI_SLACK);
    Ok((
        Trajectory {
            times: times.clone(),
            velocity: u,
            pressure_gradient: None,
        },
        diag,
    ))
}

/// Fills in `∇π(t_j) = (I - P)(f(t_j) - J_m(u(t_j))·∇u(t_j))`.
pub fn pressure_recover(u: &Trajectory, f: &Forcing, cfg: &SolverConfig) -> Result<Trajectory> {
    if let Some(u0) = u.velocity.first() {
        f.check(cfg, u0)?;
    }
    let source = momentum_source(&u.velocity, f, &cfg.power)?;
    let grad = source
        .par_iter()
        .map(|g| g.sub(&leray_project(g)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        pressure_gradient: Some(grad),
        ..u.clone()
    })
}

/// Largest `Ḃ^{s̃}_{p,∞}` norm over `t_1..t_J` of
/// `∂_t u + (-Δ)^α u + J_m(u)·∇u + ∇π - f`, relative to
/// `‖a‖_{Ḃ^{s̃+2α}_{p,∞}} + max_j ‖f(t_j)‖_{Ḃ^{s̃}_{p,∞}}` (absolute when
/// both vanish).
pub fn residual_check(
    u: &Trajectory,
    a: &SpectralField,
    f: &Forcing,
    cfg: &SolverConfig,
    scheme: ResidualScheme,
) -> Result<f64> {
    if u.len() < 3 {
        return Err(Error::Config(format!(
            "residual needs at least 3 nodes, got {}",
            u.len()
        )));
    }
    let grad = u
        .pressure_gradient
        .as_ref()
        .ok_or_else(|| Error::Shape("trajectory has no pressure gradient".into()))?;
    f.check(cfg, a)?;
    let h = &cfg.hypothesis;
    let alpha = h.alpha;
    let cutoff = build_cutoff(&cfg.grid)?;
    let res_idx = BesovIndex::new(h.s_tilde, h.p, f64::INFINITY)?;
    let rates: Vec<f64> = cfg.grid.modes().map(|(_, m)| m.norm.powf(2.0 * alpha)).collect();
    let npts = cfg.grid.points();

    let worst = (1..u.len())
        .into_par_iter()
        .map(|j| {
            let dt = u.times[j] - u.times[j - 1];
            let (now, prev) = (&u.velocity[j], &u.velocity[j - 1]);
            // Approximation of (∂_t + (-Δ)^α) u at t_j.
            let mut lin = now.clone();
            match scheme {
                ResidualScheme::Backward => {
                    let lap = fractional_laplacian(now, alpha)?;
                    lin = now.sub(prev)?.scaled(1.0 / dt).add(&lap)?;
                }
                ResidualScheme::Fitted => {
                    for (idx, &l) in rates.iter().enumerate() {
                        let decay = (-dt * l).exp();
                        let weight = if l == 0.0 { 1.0 / dt } else { l / -(-dt * l).exp_m1() };
                        for c in 0..now.components() {
                            let k = c * npts + idx;
                            lin.coeffs_mut()[k] = (now.coeffs()[k] - prev.coeffs()[k] * decay) * weight;
                        }
                    }
                }
            }
            let mut r = lin
                .add(&convective_term(now, now, &cfg.power)?)?
                .add(&grad[j])?;
            if let Some(fj) = f.at(j) {
                r = r.sub(fj)?;
            }
            besov_norm(&r, &res_idx, &cutoff)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let scale_idx = BesovIndex::new(h.s_tilde + 2.0 * alpha, h.p, f64::INFINITY)?;
    let mut scale = besov_norm(a, &scale_idx, &cutoff)?;
    scale += (0..u.len())
        .filter_map(|j| f.at(j))
        .map(|fj| besov_norm(fj, &res_idx, &cutoff))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(if scale > 0.0 { worst / scale } else { worst })
}

/// `(sin x cos y, -cos x sin y)`, a steady profile of the Euler equations
/// whose convective term is a gradient, so that with `m = 1`, `α = 1` and no
/// force the solution is `e^{-2t}` times the datum. On the box of side `8π`
/// with 64 points per axis its wavenumber `√2` lies inside the resolved
/// dyadic range.
pub fn taylor_green(grid: Grid) -> Result<SpectralField> {
    if grid.dim() != 2 {
        return Err(Error::Shape("the Taylor-Green profile is two-dimensional".into()));
    }
    let cells = grid.length() / (2.0 * std::f64::consts::PI);
    if (cells - cells.round()).abs() > 1e-12 {
        return Err(Error::Shape(format!(
            "box length {} is not a multiple of 2π",
            grid.length()
        )));
    }
    Ok(SpectralField::from_fn(grid, 2, |x| {
        [x[0].sin() * x[1].cos(), -x[0].cos() * x[1].sin(), 0.0]
    }))
}

/// Grid on which [`taylor_green`] is resolved by the dyadic blocks.
pub fn taylor_green_grid(size: usize) -> Result<Grid> {
    Grid::new(2, size, 8.0 * std::f64::consts::PI)
}

/// `true` when every velocity node is divergence-free to
/// [`DIVERGENCE_TOLERANCE`].
pub fn is_solenoidal(u: &Trajectory) -> Result<bool> {
    for f in &u.velocity {
        if !divergence_free(f)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimates::{check_hypotheses, HypothesisInput};
    use crate::spectral::semigroup_apply;
    use num_complex::Complex64;

    fn h0_plane() -> HypothesisSet {
        check_hypotheses(&HypothesisInput::new(1.0, 2, 2.0, 1.0, 3.0)).unwrap()
    }

    fn config(nodes: usize) -> SolverConfig {
        let mut cfg = SolverConfig::new(h0_plane(), Grid::periodic(2, 64).unwrap()).unwrap();
        cfg.nodes = nodes;
        cfg
    }

    #[test]
    fn config_validation() {
        let mut cfg = config(8);
        cfg.tolerance = 0.0;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        let mut cfg = config(8);
        cfg.constants = ConstantsMode::Supplied {
            k0: 0.5,
            k1: 1.0,
            k2: 1.0,
        };
        assert!(matches!(cfg.validate(), Err(Error::Parameter(_))));
        assert_eq!(config(4).times().len(), 5);
        assert_eq!(config(4).times()[0], 0.0);
    }

    #[test]
    fn linear_part_single_mode() {
        let cfg = config(6);
        let mut a = SpectralField::zeros(cfg.grid, 2);
        a.add_mode(1, &[1, 0], Complex64::new(0.5, 0.0)).unwrap();
        a.add_mode(1, &[-1, 0], Complex64::new(0.5, 0.0)).unwrap();
        let u = linear_part(&a, &cfg).unwrap();
        for (f, &t) in u.velocity.iter().zip(&u.times) {
            assert!(f.sub(&a.scaled((-t).exp())).unwrap().max_abs_coeff() < 1e-15);
        }
        let bad = SpectralField::cosine_mode(cfg.grid, &[1, 0], 1.0).unwrap();
        let bad = SpectralField::stack(&[bad.clone(), SpectralField::zeros(cfg.grid, 1)]).unwrap();
        assert!(matches!(linear_part(&bad, &cfg), Err(Error::Validation(_))));
    }

    #[test]
    fn duhamel_constant_mode() {
        let cfg = config(10);
        let mut g = SpectralField::zeros(cfg.grid, 2);
        g.add_mode(0, &[0, 2], Complex64::new(1.0, 0.0)).unwrap();
        g.add_mode(0, &[0, -2], Complex64::new(1.0, 0.0)).unwrap();
        let held = vec![g.clone(); cfg.nodes + 1];
        let s = duhamel_apply(&held, &cfg).unwrap();
        for (f, &t) in s.velocity.iter().zip(&s.times) {
            let expect = g.scaled((1.0 - (-4.0 * t).exp()) / 4.0);
            assert!(f.sub(&expect).unwrap().max_abs_coeff() < 1e-14);
        }
        assert!(matches!(duhamel_apply(&held[1..], &cfg), Err(Error::Shape(_))));
    }

    #[test]
    fn zero_data_gives_zero() {
        let cfg = config(8);
        let a = SpectralField::zeros(cfg.grid, 2);
        let (u, diag) = picard_solve(&a, &Forcing::Zero, &cfg).unwrap();
        assert_eq!(diag.iterations, 1);
        assert_eq!(diag.d_k, vec![0.0]);
        assert!(u.velocity.iter().all(|f| f.max_abs_coeff() == 0.0));
        let u = pressure_recover(&u, &Forcing::Zero, &cfg).unwrap();
        assert_eq!(residual_check(&u, &a, &Forcing::Zero, &cfg, ResidualScheme::Fitted).unwrap(), 0.0);
    }

    #[test]
    fn taylor_green_decays_exactly() {
        let mut cfg = config(16);
        cfg.grid = taylor_green_grid(64).unwrap();
        let a = taylor_green(cfg.grid).unwrap();
        let (u, diag) = picard_solve(&a, &Forcing::Zero, &cfg).unwrap();
        assert!(diag.iterations <= 2);
        for (f, &t) in u.velocity.iter().zip(&u.times) {
            let expect = semigroup_apply(&a, t, 1.0).unwrap();
            assert!(f.sub(&expect).unwrap().max_abs_coeff() < 1e-12);
        }
        let u = pressure_recover(&u, &Forcing::Zero, &cfg).unwrap();
        for (g, v) in u.pressure_gradient.as_ref().unwrap().iter().zip(&u.velocity) {
            let n = convective_term(v, v, &cfg.power).unwrap();
            assert!(g.add(&n).unwrap().max_abs_coeff() < 1e-12);
            assert!(leray_project(g).unwrap().max_abs_coeff() < 1e-12);
        }
        let res = residual_check(&u, &a, &Forcing::Zero, &cfg, ResidualScheme::Fitted).unwrap();
        assert!(res < 1e-10, "{res}");
    }

    #[test]
    fn gradient_forcing_is_pressure() {
        let cfg = config(4);
        let phi = SpectralField::cosine_mode(cfg.grid, &[1, 2], 1.0).unwrap();
        let f = crate::spectral::gradient(&phi).unwrap();
        let u = Trajectory {
            times: cfg.times(),
            velocity: vec![SpectralField::zeros(cfg.grid, 2); 5],
            pressure_gradient: None,
        };
        let u = pressure_recover(&u, &Forcing::Constant(f.clone()), &cfg).unwrap();
        for g in u.pressure_gradient.unwrap() {
            assert!(g.sub(&f).unwrap().max_abs_coeff() < 1e-15);
        }
    }

    #[test]
    fn residual_needs_three_nodes() {
        let cfg = config(4);
        let u = Trajectory {
            times: vec![0.0, 1.0],
            velocity: vec![SpectralField::zeros(cfg.grid, 2); 2],
            pressure_gradient: Some(vec![SpectralField::zeros(cfg.grid, 2); 2]),
        };
        let a = SpectralField::zeros(cfg.grid, 2);
        assert!(matches!(
            residual_check(&u, &a, &Forcing::Zero, &cfg, ResidualScheme::Backward),
            Err(Error::Config(_))
        ));
    }
}
