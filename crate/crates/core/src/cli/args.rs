use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::config::QuadratureConfig;
use crate::error::{Error, Result};
use crate::green::{GreenKind, ProblemSpec, SourceMode};
use crate::solver::{Route, SourceDescriptor, SourceTerm, SpaceTimeGrid, Temporal};

#[derive(Debug, Parser)]
#[command(
    name = "fracgreen",
    version,
    about = "Green functions and solutions of space-time fractional diffusion equations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the Mittag-Leffler function E_{α,β}(z)
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Ml(MlArgs),
    /// Tabulate the Riesz-Feller symbol Ψ(k)
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Symbol(SymbolArgs),
    /// Write a kernel over an x-grid at given times
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Green(GreenArgs),
    /// Solve the initial-value problem and write the field plus a manifest
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Solve(SolveArgs),
    /// Write the time-stepping reference field plus a manifest
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Oracle(OracleArgs),
    /// Residual norms of one field CSV against another
    #[command(args_override_self = true)]
    Compare(CompareArgs),
    /// Check the parameter constraints
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Validate(ValidateArgs),
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|e| format!("'{p}': {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected 're' or 're,im', got '{s}'")),
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SourceModeArg {
    RieszFeller,
    Identity,
}

#[derive(Debug, Clone, Args)]
pub struct SpecArgs {
    /// Plain-text key=value file; flags given on the command line win
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
    /// Diffusivity λ as 're' or 're,im'
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, conflicts_with = "schrodinger")]
    pub lambda: Option<Complex64>,
    /// Sets λ = i·hbar/(2m)
    #[arg(long, num_args = 2, value_names = ["M", "HBAR"])]
    pub schrodinger: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,
    /// Source strength μ as 're' or 're,im'
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0")]
    pub mu: Complex64,
    #[arg(long, value_enum, default_value = "riesz-feller")]
    pub source_mode: SourceModeArg,
}

impl SpecArgs {
    pub fn spec(&self) -> Result<ProblemSpec> {
        let lambda = match (&self.schrodinger, self.lambda) {
            (Some(mh), _) => {
                let (m, hbar) = (mh[0], mh[1]);
                if !(m > 0.0 && m.is_finite() && hbar.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "schrodinger mass {m} must be positive"
                    )));
                }
                Complex64::new(0.0, hbar / (2.0 * m))
            }
            (None, Some(l)) => l,
            (None, None) => Complex64::new(1.0, 0.0),
        };
        let mode = match self.source_mode {
            SourceModeArg::RieszFeller => SourceMode::RieszFeller,
            SourceModeArg::Identity => SourceMode::Identity,
        };
        Ok(ProblemSpec::new(self.alpha, self.beta, self.theta)
            .with_lambda(lambda)
            .with_source(self.gamma, self.phi, self.mu, mode))
    }
}

#[derive(Debug, Clone, Args)]
pub struct QuadArgs {
    #[arg(long)]
    pub k_max: Option<f64>,
    #[arg(long)]
    pub nodes_per_unit: Option<usize>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub mb_contour_height: Option<f64>,
}

impl QuadArgs {
    pub fn config(&self) -> QuadratureConfig {
        let d = QuadratureConfig::default();
        QuadratureConfig {
            k_max: self.k_max.unwrap_or(d.k_max),
            nodes_per_unit: self.nodes_per_unit.unwrap_or(d.nodes_per_unit),
            abs_tol: self.abs_tol.unwrap_or(d.abs_tol),
            rel_tol: self.rel_tol.unwrap_or(d.rel_tol),
            mb_contour_height: self.mb_contour_height.unwrap_or(d.mb_contour_height),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], default_values_t = [-10.0, 10.0])]
    pub x_range: Vec<f64>,
    #[arg(long, default_value_t = 256)]
    pub nx: usize,
    /// Output times
    #[arg(long = "t", num_args = 1.., required = true)]
    pub times: Vec<f64>,
    /// Time step for source integrals and the reference solver
    #[arg(long, default_value_t = 1.0 / 1024.0)]
    pub dt: f64,
}

impl GridArgs {
    pub fn grid(&self) -> Result<SpaceTimeGrid> {
        SpaceTimeGrid::new(self.x_range[0], self.x_range[1], self.nx, self.times.clone(), self.dt)
    }
}

/// Profiles are written `zero`, `delta:C`, `gaussian:C,W`, `box:LO,HI`.
pub fn parse_profile(s: &str) -> std::result::Result<SourceDescriptor, String> {
    let (name, rest) = s.split_once(':').unwrap_or((s, ""));
    let nums: Vec<f64> = if rest.trim().is_empty() {
        Vec::new()
    } else {
        rest.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}")))
            .collect::<std::result::Result<_, _>>()?
    };
    match (name.trim().to_ascii_lowercase().as_str(), nums.as_slice()) {
        ("zero", []) => Ok(SourceDescriptor::Zero),
        ("delta", [c]) => Ok(SourceDescriptor::DiracDelta { center: *c }),
        ("delta", []) => Ok(SourceDescriptor::DiracDelta { center: 0.0 }),
        ("gaussian", [c, w]) => Ok(SourceDescriptor::Gaussian { center: *c, width: *w }),
        ("box", [lo, hi]) => Ok(SourceDescriptor::Box { lo: *lo, hi: *hi }),
        _ => Err(format!(
            "unknown profile '{s}' (expected zero, delta:C, gaussian:C,W or box:LO,HI)"
        )),
    }
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// First initial condition D^{α−1}N(0)
    #[arg(long, value_parser = parse_profile, allow_hyphen_values = true, default_value = "delta:0")]
    pub f: SourceDescriptor,
    /// Source profile U, `coupled` for U = N
    #[arg(long, allow_hyphen_values = true, default_value = "zero")]
    pub source: String,
    /// Makes the source profile·e^{rate·t}
    #[arg(long)]
    pub source_rate: Option<f64>,
}

impl DataArgs {
    pub fn source(&self) -> Result<SourceTerm> {
        if self.source.trim().eq_ignore_ascii_case("coupled") {
            return Ok(SourceTerm::SelfCoupled);
        }
        let profile = parse_profile(&self.source).map_err(Error::Parse)?;
        if profile.is_zero() {
            return Ok(SourceTerm::Zero);
        }
        let temporal = match self.source_rate {
            Some(rate) => Temporal::Exponential { rate },
            None => Temporal::Constant,
        };
        Ok(SourceTerm::Separable { profile, temporal })
    }
}

#[derive(Debug, Args)]
pub struct MlArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub beta: f64,
    /// Argument as 're' or 're,im'
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub z: Complex64,
}

#[derive(Debug, Args)]
pub struct SymbolArgs {
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], default_values_t = [-10.0, 10.0])]
    pub k_range: Vec<f64>,
    #[arg(long, default_value_t = 21)]
    pub nk: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Closed form where it applies, quadrature elsewhere
    Auto,
    Quadrature,
    Closed,
}

#[derive(Debug, Args)]
pub struct GreenArgs {
    #[arg(long, default_value = "G")]
    pub kind: GreenKind,
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: Method,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    Auto,
    Spectral,
    RealSpace,
    Periodic,
}

impl From<RouteArg> for Route {
    fn from(r: RouteArg) -> Self {
        match r {
            RouteArg::Auto => Route::Auto,
            RouteArg::Spectral => Route::Spectral,
            RouteArg::RealSpace => Route::RealSpace,
            RouteArg::Periodic => Route::Periodic,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub data: DataArgs,
    /// Second initial condition D^{α−2}N(0), for 1 < α ≤ 2
    #[arg(long, value_parser = parse_profile, allow_hyphen_values = true, default_value = "zero")]
    pub g: SourceDescriptor,
    #[arg(long, value_enum, default_value = "auto")]
    pub route: RouteArg,
    /// Write the kernel itself (delta data) without any convolution
    #[arg(long)]
    pub fundamental: bool,
    /// Kernel written in fundamental mode
    #[arg(long, default_value = "G")]
    pub kind: GreenKind,
    #[arg(long)]
    pub out: PathBuf,
    /// Defaults to the output path with a .json extension
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Field under test
    pub field: PathBuf,
    /// Reference field
    pub reference: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
}
