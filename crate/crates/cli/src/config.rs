//! Run configuration files for `gns solve`.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use gns_core::besov::{besov_norm, build_cutoff, BesovIndex};
use gns_core::estimates::{check_hypotheses, FieldGenerator, HypothesisInput};
use gns_core::nonlinearity::PowerLaw;
use gns_core::solver::{
    gate_arithmetic, taylor_green, Constants, ConstantsMode, Forcing, GatePolicy, ResidualScheme,
    SolverConfig,
};
use gns_core::spectral::io::load_field;
use gns_core::spectral::{Grid, SpectralField};

use crate::Failure;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypothesisSpec {
    pub m: f64,
    pub n: usize,
    pub p: f64,
    pub alpha: f64,
    pub rho: f64,
    pub r: Option<f64>,
    pub p0: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub size: usize,
    pub length: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateSpec {
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ConstantsSpec {
    Supplied { k0: f64, k1: f64, k2: f64 },
    Estimated { estimate: EstimateSpec },
}

impl Default for ConstantsSpec {
    fn default() -> Self {
        ConstantsSpec::Supplied {
            k0: 1.0,
            k1: 1.0,
            k2: 1.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialSpec {
    Zero,
    TaylorGreen,
    /// Random solenoidal field; scaled to a given `‖a‖_{Ḃ^{s0}_{p0,r}}` or so
    /// that `K0` is a given fraction of `η`.
    Random {
        seed: u64,
        sigma: Option<f64>,
        norm: Option<f64>,
        k0_over_eta: Option<f64>,
    },
    File {
        path: PathBuf,
        scale: Option<f64>,
    },
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ForcingSpec {
    #[default]
    Zero,
    /// Constant in time.
    File { path: PathBuf },
    /// One file per node `t_0..t_J`.
    Nodes { paths: Vec<PathBuf> },
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum GateSpec {
    #[default]
    Warn,
    Abort,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeSpec {
    #[default]
    Fitted,
    Backward,
}

fn default_horizon() -> f64 {
    1.0
}
fn default_nodes() -> usize {
    64
}
fn default_tolerance() -> f64 {
    1e-10
}
fn default_iterations() -> usize {
    50
}
fn default_dealias() -> usize {
    2
}
fn default_threshold() -> f64 {
    1e-4
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub hypothesis: HypothesisSpec,
    pub grid: GridSpec,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_iterations")]
    pub max_iterations: usize,
    #[serde(default)]
    pub constants: ConstantsSpec,
    #[serde(default = "default_dealias")]
    pub dealias: usize,
    #[serde(default)]
    pub gate: GateSpec,
    #[serde(default)]
    pub project: bool,
    pub initial: InitialSpec,
    #[serde(default)]
    pub forcing: ForcingSpec,
    #[serde(default = "default_threshold")]
    pub residual_threshold: f64,
    #[serde(default)]
    pub residual_scheme: SchemeSpec,
}

/// Everything `solve` needs, with data loaded and constants resolved.
pub struct Run {
    pub cfg: SolverConfig,
    pub constants: Constants,
    pub initial: SpectralField,
    pub forcing: Forcing,
    pub threshold: f64,
    pub scheme: ResidualScheme,
}

impl RunSpec {
    pub fn parse(text: &str) -> Result<Self, Failure> {
        serde_json::from_str(text).map_err(|e| Failure::Usage(format!("bad run configuration: {e}")))
    }

    pub fn build(&self, base: &Path, gate_override: Option<GateSpec>) -> Result<Run, Failure> {
        let hs = &self.hypothesis;
        let mut input = HypothesisInput::new(hs.m, hs.n, hs.p, hs.alpha, hs.rho);
        if let Some(r) = hs.r {
            input = input.with_r(r);
        }
        if let Some(p0) = hs.p0 {
            input = input.with_p0(p0);
        }
        let h = check_hypotheses(&input)?;
        let grid = Grid::new(hs.n, self.grid.size, self.grid.length)?;
        let gate = gate_override.unwrap_or(self.gate);
        let cfg = SolverConfig {
            power: PowerLaw::new(h.m, self.dealias)?,
            hypothesis: h,
            grid,
            horizon: self.horizon,
            nodes: self.nodes,
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
            constants: match &self.constants {
                ConstantsSpec::Supplied { k0, k1, k2 } => ConstantsMode::Supplied {
                    k0: *k0,
                    k1: *k1,
                    k2: *k2,
                },
                ConstantsSpec::Estimated { estimate } => ConstantsMode::Estimated {
                    samples: estimate.samples,
                    seed: estimate.seed,
                },
            },
            gate_policy: match gate {
                GateSpec::Warn => GatePolicy::Warn,
                GateSpec::Abort => GatePolicy::Abort,
            },
            project_data: self.project,
        };
        cfg.validate()?;
        let constants = Constants::resolve(&cfg.constants, &cfg.hypothesis, grid)?;
        let forcing = self.load_forcing(base, &cfg)?;
        let initial = self.load_initial(base, &cfg, &constants, &forcing)?;
        Ok(Run {
            cfg,
            constants,
            initial,
            forcing,
            threshold: self.residual_threshold,
            scheme: match self.residual_scheme {
                SchemeSpec::Fitted => ResidualScheme::Fitted,
                SchemeSpec::Backward => ResidualScheme::Backward,
            },
        })
    }

    fn load_forcing(&self, base: &Path, cfg: &SolverConfig) -> Result<Forcing, Failure> {
        let load = |p: &PathBuf| -> Result<SpectralField, Failure> {
            let f = load_field(&base.join(p))?;
            if f.grid() != &cfg.grid {
                return Err(Failure::Usage(format!(
                    "{} is not on the configured grid",
                    p.display()
                )));
            }
            Ok(f)
        };
        Ok(match &self.forcing {
            ForcingSpec::Zero => Forcing::Zero,
            ForcingSpec::File { path } => Forcing::Constant(load(path)?),
            ForcingSpec::Nodes { paths } => {
                Forcing::Nodes(paths.iter().map(load).collect::<Result<_, _>>()?)
            }
        })
    }

    fn load_initial(
        &self,
        base: &Path,
        cfg: &SolverConfig,
        constants: &Constants,
        forcing: &Forcing,
    ) -> Result<SpectralField, Failure> {
        let grid = cfg.grid;
        let h = &cfg.hypothesis;
        match &self.initial {
            InitialSpec::Zero => Ok(SpectralField::zeros(grid, h.n)),
            InitialSpec::TaylorGreen => Ok(taylor_green(grid)?),
            InitialSpec::File { path, scale } => {
                let a = load_field(&base.join(path))?;
                if a.grid() != &grid {
                    return Err(Failure::Usage(format!(
                        "{} is not on the configured grid",
                        path.display()
                    )));
                }
                Ok(a.scaled(scale.unwrap_or(1.0)))
            }
            InitialSpec::Random {
                seed,
                sigma,
                norm,
                k0_over_eta,
            } => {
                let gen = FieldGenerator::new(grid, sigma.unwrap_or(1.0), h.n, true)?;
                let a = gen.sample(&mut ChaCha8Rng::seed_from_u64(*seed))?;
                let cutoff = build_cutoff(&grid)?;
                let a_norm = besov_norm(&a, &BesovIndex::new(h.s0, h.p0, h.r)?, &cutoff)?;
                let target = match (norm, k0_over_eta) {
                    (Some(v), None) => *v,
                    (None, Some(frac)) => {
                        let eta = gate_arithmetic(0.0, constants.k2)?.eta;
                        let probe = gns_core::solver::smallness_gate(&a, forcing, cfg, constants)?;
                        let f_part = constants.k1 * probe.norms.get("f_forcing").unwrap_or(0.0);
                        let room = frac * eta - f_part;
                        if !(room > 0.0) {
                            return Err(Failure::Usage(
                                "the forcing alone exceeds the requested K0".into(),
                            ));
                        }
                        room / constants.k0
                    }
                    _ => {
                        return Err(Failure::Usage(
                            "random initial data needs exactly one of norm, k0_over_eta".into(),
                        ))
                    }
                };
                Ok(a.scaled(target / a_norm))
            }
        }
    }
}
