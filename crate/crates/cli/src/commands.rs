use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;

use gns_core::besov::{build_cutoff, BesovIndex, NormRecord};
use gns_core::estimates::{
    estimate_constant, lemma_ab, scaling_invariance_check, InequalityId, InequalityReport,
    LabConfig,
};
use gns_core::lorentz::{lorentz_norm, LorentzIndex, TimeSamples};
use gns_core::report::{num, to_json, to_json_pretty};
use gns_core::solver::{
    picard_solve_with, pressure_recover, smallness_gate, ContractionDiagnostics, GatePolicy,
    Start,
};
use gns_core::spectral::io::{load_field, save_field};
use gns_core::spectral::{Grid, SpectralField};
use gns_core::Error;

use crate::config::{GateSpec, RunSpec};
use crate::{presets, Failure, HypFlags};

pub fn hypotheses(flags: &HypFlags) -> Result<(), Failure> {
    match flags.resolve() {
        Ok(set) => {
            crate::say(&to_json_pretty(&set)?);
            Ok(())
        }
        Err(Failure::Invalid(e)) => {
            #[derive(Serialize)]
            struct Rejected {
                valid: bool,
                violations: Vec<String>,
            }
            let violations = match e {
                Error::Validation(v) => v,
                other => vec![other.to_string()],
            };
            crate::say(&to_json_pretty(&Rejected {
                valid: false,
                violations,
            })?);
            Err(Failure::Code(2))
        }
        Err(other) => Err(other),
    }
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Inequality id (PROD1, ..., BILIN_DIFF), `lemma-ab`, or `all`.
    #[arg(long)]
    pub ineq: String,
    #[command(flatten)]
    pub hyp: HypFlags,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Envelope exponent of the sampled fields.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Time nodes per sampled trajectory.
    #[arg(long, default_value_t = 12)]
    pub nodes: usize,
    /// Directory receiving one report file per inequality.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct NotApplicable {
    ineq_id: String,
    hypothesis_label: String,
    not_applicable: String,
}

fn emit(report: &InequalityReport, out: Option<&Path>) -> Result<bool, Failure> {
    let line = to_json(report)?;
    crate::say(&line);
    if let Some(dir) = out {
        fs::write(dir.join(format!("{}.json", report.ineq_id)), format!("{line}\n"))?;
    }
    Ok(report.violations == 0 && report.max_ratio.is_finite())
}

pub fn verify(args: &VerifyArgs) -> Result<(), Failure> {
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)?;
    }
    let out = args.out.as_deref();
    let key = args.ineq.trim().to_ascii_lowercase();
    let cfg = LabConfig {
        samples: args.samples,
        seed: args.seed,
        sigma: args.sigma,
        nodes: args.nodes,
        ..LabConfig::default()
    };
    let mut ok = true;
    if key == "lemma-ab" || key == "lemma_ab" {
        ok &= emit(&lemma_ab(args.samples, args.seed)?, out)?;
    } else if key == "all" {
        let h = args.hyp.resolve().map_err(invalid_is_usage)?;
        for id in InequalityId::ALL {
            match estimate_constant(id, &h, &cfg) {
                Ok(rep) => ok &= emit(&rep, out)?,
                Err(Error::Validation(v)) => crate::say(&to_json(&NotApplicable {
                    ineq_id: id.as_str().into(),
                    hypothesis_label: h.label.as_str().into(),
                    not_applicable: v.join("; "),
                })?),
                Err(e) => return Err(e.into()),
            }
        }
        ok &= emit(&lemma_ab(args.samples, args.seed)?, out)?;
    } else {
        let id = InequalityId::parse(&key)
            .ok_or_else(|| Failure::Usage(format!("unknown inequality id {:?}", args.ineq)))?;
        let h = args.hyp.resolve().map_err(invalid_is_usage)?;
        ok &= emit(&estimate_constant(id, &h, &cfg)?, out)?;
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Code(1))
    }
}

fn invalid_is_usage(f: Failure) -> Failure {
    match f {
        Failure::Invalid(e) => Failure::Usage(e.to_string()),
        other => other,
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GateArg {
    Warn,
    Abort,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Run configuration (JSON).
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Shipped configuration: taylor-green, zero-data, h1-small-data,
    /// h2-small-data, large-amplitude.
    #[arg(long)]
    pub preset: Option<String>,
    /// Output directory.
    #[arg(long, default_value = "gns-run")]
    pub out: PathBuf,
    /// Overrides the gate policy of the configuration.
    #[arg(long, value_enum)]
    pub gate: Option<GateArg>,
    /// Skip writing the per-node field files.
    #[arg(long)]
    pub no_fields: bool,
}

fn write_diagnostics(diag: &ContractionDiagnostics, out: &Path) -> Result<(), Failure> {
    diag.write_json(&out.join("diagnostics.json"))?;
    crate::say(&to_json_pretty(diag)?);
    Ok(())
}

pub fn solve(args: &SolveArgs) -> Result<(), Failure> {
    let (text, base) = match (&args.config, &args.preset) {
        (Some(path), None) => (
            fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
            path.parent().map(Path::to_path_buf).unwrap_or_default(),
        ),
        (None, Some(name)) => (
            presets::run(name).map_err(Failure::Usage)?.to_string(),
            PathBuf::from("."),
        ),
        _ => return Err(Failure::Usage("give exactly one of --config, --preset".into())),
    };
    let spec = RunSpec::parse(&text)?;
    let gate = args.gate.map(|g| match g {
        GateArg::Warn => GateSpec::Warn,
        GateArg::Abort => GateSpec::Abort,
    });
    let run = spec.build(&base, gate)?;
    fs::create_dir_all(&args.out)?;

    let gate_diag = smallness_gate(&run.initial, &run.forcing, &run.cfg, &run.constants)?;
    if !gate_diag.verdict.gate {
        let reason = gate_diag.verdict.reason.clone().unwrap_or_default();
        if run.cfg.gate_policy == GatePolicy::Abort {
            write_diagnostics(&gate_diag, &args.out)?;
            eprintln!("smallness gate failed: {reason}");
            return Err(Failure::Code(3));
        }
        eprintln!("warning: smallness gate failed ({reason}); iterating anyway");
    }

    let (u, mut diag) =
        match picard_solve_with(&run.initial, &run.forcing, &run.cfg, Start::Linear, &run.constants) {
            Ok(v) => v,
            Err(Error::Divergence { iterations, last, updates }) => {
                let mut diag = gate_diag;
                diag.iterations = iterations;
                diag.d_k = updates;
                write_diagnostics(&diag, &args.out)?;
                eprintln!("no convergence in {iterations} iterations (last update {last:e})");
                return Err(Failure::Code(4));
            }
            Err(e @ Error::Blowup { .. }) => {
                write_diagnostics(&gate_diag, &args.out)?;
                eprintln!("{e}");
                return Err(Failure::Code(4));
            }
            Err(e) => return Err(e.into()),
        };
    let u = pressure_recover(&u, &run.forcing, &run.cfg)?;
    let residual =
        gns_core::solver::residual_check(&u, &run.initial, &run.forcing, &run.cfg, run.scheme)?;
    diag.residual = Some(residual);

    u.write_norm_csv(&run.cfg.hypothesis, &args.out.join("norms.csv"))?;
    if !args.no_fields {
        let dir = args.out.join("fields");
        fs::create_dir_all(&dir)?;
        let grads = u.pressure_gradient.as_deref().unwrap_or_default();
        for (j, v) in u.velocity.iter().enumerate() {
            save_field(&dir.join(format!("u_{j:04}.gnsf")), v)?;
        }
        for (j, g) in grads.iter().enumerate() {
            save_field(&dir.join(format!("grad_pi_{j:04}.gnsf")), g)?;
        }
        let mut times = fs::File::create(dir.join("times.csv"))?;
        writeln!(times, "node,t")?;
        for (j, t) in u.times.iter().enumerate() {
            writeln!(times, "{j},{}", gns_core::report::format_f64(*t))?;
        }
    }
    write_diagnostics(&diag, &args.out)?;
    if residual < run.threshold {
        Ok(())
    } else {
        eprintln!(
            "residual {residual:e} is not below the threshold {:e}",
            run.threshold
        );
        Err(Failure::Code(4))
    }
}

#[derive(Args, Debug)]
pub struct ScalingArgs {
    #[command(flatten)]
    pub hyp: HypFlags,
    /// Initial field file.
    #[arg(long, conflicts_with = "preset")]
    pub field: Option<PathBuf>,
    /// Built-in field: single-mode (|k| = 2) or nyquist-mode.
    #[arg(long)]
    pub preset: Option<String>,
    /// Dilation factor, a power of two.
    #[arg(long, default_value_t = 2.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 16)]
    pub nodes: usize,
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
}

/// Box of side `4π` (`k0 = 1/2`) with 64 points per axis, holding a single
/// mode `cos(2 x_1)` in the second velocity component.
fn scaling_preset(name: &str, n: usize) -> Result<SpectralField, Failure> {
    let grid = Grid::new(n, 64, 4.0 * std::f64::consts::PI)?;
    let mut z = vec![0i64; n];
    z[0] = match name {
        "single-mode" => 4,
        "nyquist-mode" => 31,
        other => return Err(Failure::Usage(format!("unknown field preset {other:?}"))),
    };
    let mode = SpectralField::cosine_mode(grid, &z, 1.0)?;
    let mut parts = vec![SpectralField::zeros(grid, 1); n];
    parts[1] = mode;
    Ok(SpectralField::stack(&parts)?)
}

pub fn scaling(args: &ScalingArgs) -> Result<(), Failure> {
    let h = args.hyp.resolve().map_err(invalid_is_usage)?;
    let j = args.lambda.log2().round();
    if !(args.lambda > 0.0) || 2f64.powi(j as i32) != args.lambda {
        return Err(Failure::Usage(format!(
            "lambda must be a power of two, got {}",
            args.lambda
        )));
    }
    let a = match (&args.field, &args.preset) {
        (Some(path), None) => load_field(path)?,
        (None, Some(name)) => scaling_preset(name, h.n)?,
        _ => return Err(Failure::Usage("give exactly one of --field, --preset".into())),
    };
    match scaling_invariance_check(&a, &h, j as i32, args.nodes, args.horizon) {
        Ok(rep) => {
            crate::say(&to_json_pretty(&rep)?);
            if rep.within_tolerance {
                Ok(())
            } else {
                Err(Failure::Code(2))
            }
        }
        Err(e @ Error::Range(_)) => {
            eprintln!("error: {e}");
            Err(Failure::Code(2))
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Args, Debug)]
pub struct NormsArgs {
    /// Field file; prints its Besov norm.
    #[arg(long, conflicts_with = "series")]
    pub field: Option<PathBuf>,
    /// Time series CSV (`t,value`); prints its Lorentz norm.
    #[arg(long)]
    pub series: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    pub s: f64,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Summation index (Besov) or second Lorentz index.
    #[arg(long, default_value_t = 2.0)]
    pub r: f64,
    #[arg(long)]
    pub rho: Option<f64>,
    /// Defaults to the last node of the series.
    #[arg(long)]
    pub horizon: Option<f64>,
}

#[derive(Serialize)]
struct LorentzRecord {
    series_id: String,
    #[serde(serialize_with = "num")]
    rho: f64,
    #[serde(serialize_with = "num")]
    r: f64,
    #[serde(serialize_with = "num")]
    horizon: f64,
    #[serde(serialize_with = "num")]
    value: f64,
}

pub fn norms(args: &NormsArgs) -> Result<(), Failure> {
    match (&args.field, &args.series) {
        (Some(path), None) => {
            let f = load_field(path)?;
            let cutoff = build_cutoff(f.grid())?;
            let rec = NormRecord::measure(
                path.display().to_string(),
                &f,
                &BesovIndex::new(args.s, args.p, args.r)?,
                &cutoff,
            )?;
            crate::say(&to_json(&rec)?);
        }
        (None, Some(path)) => {
            let rho = args
                .rho
                .ok_or_else(|| Failure::Usage("--series needs --rho".into()))?;
            let ts = TimeSamples::read_csv(path)?;
            let horizon = args.horizon.unwrap_or(ts.last_node());
            let value = lorentz_norm(&ts, &LorentzIndex::new(rho, args.r)?, horizon)?;
            let rec = LorentzRecord {
                series_id: path.display().to_string(),
                rho,
                r: args.r,
                horizon,
                value,
            };
            crate::say(&to_json(&rec)?);
        }
        _ => return Err(Failure::Usage("give exactly one of --field, --series".into())),
    }
    Ok(())
}
