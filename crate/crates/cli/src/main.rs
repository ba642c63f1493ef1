//! `gns`: hypotheses, empirical constants, mild solutions and scaling checks.

mod commands;
mod config;
mod presets;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gns_core::estimates::{check_hypotheses, HypothesisInput, HypothesisSet};

#[derive(Parser, Debug)]
#[command(name = "gns", version, about = "Generalised Navier-Stokes laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate an exponent set and print its derived exponents.
    Hypotheses(HypFlags),
    /// Estimate inequality constants or check the pointwise lemma.
    Verify(commands::VerifyArgs),
    /// Solve from a run configuration.
    Solve(commands::SolveArgs),
    /// Check invariance of the critical norms under dilation.
    Scaling(commands::ScalingArgs),
    /// Besov norm of a field file or Lorentz norm of a time series.
    Norms(commands::NormsArgs),
}

/// Exponent flags shared by several subcommands.
#[derive(Args, Debug, Clone, Default)]
pub struct HypFlags {
    /// Worked exponent set: h0, h1, h2 (three-dimensional) or h0-plane,
    /// h1-plane, h2-plane.
    #[arg(long)]
    pub set: Option<String>,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub p0: Option<f64>,
}

impl HypFlags {
    /// Explicit flags override the values of `--set`.
    pub fn input(&self) -> Result<HypothesisInput, String> {
        let base = match &self.set {
            Some(name) => Some(presets::worked_set(name)?),
            None => None,
        };
        let pick = |flag: Option<f64>, from: Option<f64>, name: &str| {
            flag.or(from).ok_or_else(|| format!("missing --{name}"))
        };
        let m = pick(self.m, base.map(|b| b.m), "m")?;
        let n = self.n.or(base.map(|b| b.n)).ok_or("missing --n")?;
        let p = pick(self.p, base.map(|b| b.p), "p")?;
        let alpha = pick(self.alpha, base.map(|b| b.alpha), "alpha")?;
        let rho = pick(self.rho, base.map(|b| b.rho), "rho")?;
        let mut input = HypothesisInput::new(m, n, p, alpha, rho);
        if let Some(r) = self.r.or(base.and_then(|b| b.r)) {
            input = input.with_r(r);
        }
        if let Some(p0) = self.p0.or(base.and_then(|b| b.p0)) {
            input = input.with_p0(p0);
        }
        Ok(input)
    }

    pub fn resolve(&self) -> Result<HypothesisSet, Failure> {
        let input = self.input().map_err(Failure::Usage)?;
        check_hypotheses(&input).map_err(Failure::Invalid)
    }
}

/// Why a subcommand stopped; each variant maps to an exit code.
#[derive(Debug)]
pub enum Failure {
    /// Malformed arguments or unusable input files.
    Usage(String),
    /// Hypotheses rejected.
    Invalid(gns_core::Error),
    Code(u8),
}

impl From<gns_core::Error> for Failure {
    fn from(e: gns_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn init_threads() {
    if let Some(n) = std::env::var("GNS_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // Only fails when a pool already exists, in which case it is kept.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    init_threads();
    let result = match cli.command {
        Command::Hypotheses(flags) => commands::hypotheses(&flags),
        Command::Verify(args) => commands::verify(&args),
        Command::Solve(args) => commands::solve(&args),
        Command::Scaling(args) => commands::scaling(&args),
        Command::Norms(args) => commands::norms(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Code(c)) => ExitCode::from(c),
    }
}

/// Writes a line to stdout, ignoring a closed pipe.
pub fn say(line: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}
