//! Command-line front end. [`run`] takes the full argv and returns the exit code:
//! 0 on success, 1 for usage and I/O errors, 2 for constraint violations and 3
//! when a numerical method misses its tolerance.

mod args;

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{CommandFactory, Parser};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use args::parse_profile;
use args::{Cli, Command, CompareArgs, GreenArgs, Method, MlArgs, OracleArgs, SolveArgs, SymbolArgs, ValidateArgs};

use crate::config::QuadratureConfig;
use crate::error::{Error, Result};
use crate::fracmath::mittag_leffler;
use crate::green::{green_mass, green_point, green_point_closed, GreenKind, ProblemSpec};
use crate::operators::{riesz_feller_symbol, SymbolParams};
use crate::oracle::{oracle_solve_with_source, OracleConfig};
use crate::solver::{
    compare_fields, solve_with, Field, Route, SolveOptions, SourceDescriptor, SourceTerm, SpaceTimeGrid,
    OUTSIDE_MASS_WARN, SOURCE_TIME_TOL,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CONSTRAINT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub residual: f64,
}

/// Everything needed to repeat a `solve` or `oracle` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub spec: ProblemSpec,
    pub grid: SpaceTimeGrid,
    pub quadrature: Option<QuadratureConfig>,
    pub f: SourceDescriptor,
    pub g: Option<SourceDescriptor>,
    pub source: SourceTerm,
    pub route: Option<Route>,
    pub fundamental: bool,
    pub checks: Vec<Check>,
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_constraint() {
        EXIT_CONSTRAINT
    } else if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_USAGE
    }
}

pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let argv = match expand_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match thread_pool() {
        Ok(pool) => pool.install(|| dispatch(cli.command, &argv)),
        Err(e) => Err(e),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// FRACGREEN_THREADS caps the worker count; unset or 0 leaves it to rayon.
fn thread_pool() -> Result<rayon::ThreadPool> {
    let n = match std::env::var("FRACGREEN_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("FRACGREEN_THREADS = '{v}': {e}")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))
}

/// Splices the `key = value` lines of a `--config` file in front of the
/// subcommand's own flags, so that later flags override them. Keys the
/// subcommand does not take are skipped, so one file can serve several.
fn expand_config(argv: Vec<String>) -> Result<Vec<String>> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        if a == "--config" {
            path = argv.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else { return Ok(argv) };
    if argv.len() < 2 {
        return Ok(argv);
    }
    let text = std::fs::read_to_string(&path).map_err(|e| Error::Parse(format!("config file {path}: {e}")))?;
    let known: Vec<String> = Cli::command()
        .find_subcommand(&argv[1])
        .map(|sub| {
            sub.get_arguments()
                .filter_map(|a| a.get_long().map(String::from))
                .collect()
        })
        .unwrap_or_default();
    let mut extra = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("{path}:{}: expected key = value", lineno + 1)))?;
        let key = key.trim().replace('_', "-");
        if !known.contains(&key) {
            log::warn!("{path}: '{key}' does not apply to {}", argv[1]);
            continue;
        }
        match value.trim() {
            "true" => extra.push(format!("--{key}")),
            "false" => {}
            v => {
                extra.push(format!("--{key}"));
                extra.extend(v.split_whitespace().map(String::from));
            }
        }
    }
    let mut out = argv[..2].to_vec();
    out.extend(extra);
    out.extend(argv[2..].iter().cloned());
    Ok(out)
}

fn dispatch(command: Command, argv: &[String]) -> Result<()> {
    match command {
        Command::Ml(a) => ml(a),
        Command::Symbol(a) => symbol(a),
        Command::Green(a) => green(a),
        Command::Solve(a) => solve(a, argv),
        Command::Oracle(a) => oracle(a, argv),
        Command::Compare(a) => compare(a),
        Command::Validate(a) => validate(a),
    }
}

fn writer(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn ml(a: MlArgs) -> Result<()> {
    let v = mittag_leffler(a.alpha, a.beta, a.z)?;
    println!("{:.16e},{:.16e}", v.re, v.im);
    Ok(())
}

fn symbol(a: SymbolArgs) -> Result<()> {
    let p = SymbolParams::new(a.beta, a.theta)?;
    if a.nk < 2 {
        return Err(Error::InvalidParameter(format!("nk = {} must be at least 2", a.nk)));
    }
    let (lo, hi) = (a.k_range[0], a.k_range[1]);
    let mut out = writer(a.out.as_deref())?;
    writeln!(out, "k,re,im")?;
    for i in 0..a.nk {
        let k = lo + (hi - lo) * i as f64 / (a.nk - 1) as f64;
        let v = riesz_feller_symbol(&p, k);
        writeln!(out, "{k:.16e},{:.16e},{:.16e}", v.re, v.im)?;
    }
    out.flush()?;
    Ok(())
}

fn closed_applies(kind: GreenKind, x: f64, spec: &ProblemSpec) -> bool {
    matches!(kind, GreenKind::G | GreenKind::G2) && spec.lambda_real_positive() && x != 0.0
}

/// One kernel value and the method that produced it.
fn kernel_value(
    kind: GreenKind,
    x: f64,
    t: f64,
    spec: &ProblemSpec,
    cfg: &QuadratureConfig,
    method: Method,
) -> Result<(Complex64, &'static str)> {
    let closed = match method {
        Method::Auto => closed_applies(kind, x, spec),
        Method::Closed => true,
        Method::Quadrature => false,
    };
    if closed {
        Ok((
            Complex64::new(green_point_closed(kind, x, t, spec, cfg)?, 0.0),
            "closed",
        ))
    } else {
        Ok((green_point(kind, x, t, spec, cfg)?, "quadrature"))
    }
}

fn green(a: GreenArgs) -> Result<()> {
    let spec = a.spec.spec()?;
    spec.validate()?;
    let grid = a.grid.grid()?;
    let cfg = a.quad.config();
    let mut out = writer(a.out.as_deref())?;
    writeln!(out, "t,x,re,im,method")?;
    for &t in &grid.times {
        for x in grid.xs() {
            let (v, method) = kernel_value(a.kind, x, t, &spec, &cfg, a.method)?;
            writeln!(out, "{t:.16e},{x:.16e},{:.16e},{:.16e},{method}", v.re, v.im)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn manifest_path(out: &Path, manifest: Option<PathBuf>) -> PathBuf {
    manifest.unwrap_or_else(|| out.with_extension("json"))
}

fn write_outputs(field: &Field, out: &Path, manifest: &RunManifest, manifest_out: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(out)?);
    field.write_csv(&mut w)?;
    w.flush()?;
    let json = serde_json::to_string_pretty(manifest).map_err(|e| Error::Parse(e.to_string()))?;
    std::fs::write(manifest_out, json + "\n")?;
    Ok(())
}

fn solve(a: SolveArgs, argv: &[String]) -> Result<()> {
    let spec = a.spec.spec()?;
    let grid = a.grid.grid()?;
    let cfg = a.quad.config();
    let source = a.data.source()?;
    let mut checks = Vec::new();
    let (field, route) = if a.fundamental {
        spec.validate()?;
        cfg.validate()?;
        let mut field = Field::zeros(&grid);
        let dx = grid.dx();
        for (row, &t) in field.values.iter_mut().zip(&grid.times) {
            for (v, x) in row.iter_mut().zip(grid.xs()) {
                *v = kernel_value(a.kind, x, t, &spec, &cfg, Method::Auto)?.0;
            }
            // mass caught by the window against the exact k = 0 value
            let mass = green_mass(a.kind, t, &spec)?;
            let caught: Complex64 = row.iter().sum::<Complex64>() * dx;
            let residual = (caught - mass).norm() / mass.norm().max(f64::MIN_POSITIVE);
            checks.push(Check {
                name: format!("window_mass_t={t}"),
                pass: residual <= OUTSIDE_MASS_WARN,
                residual,
            });
        }
        (field, None)
    } else {
        let opts = SolveOptions { route: a.route.into() };
        let sol = solve_with(&spec, &a.data.f, &a.g, &source, &grid, &cfg, &opts)?;
        checks.push(Check {
            name: "outside_mass".into(),
            pass: sol.outside_mass <= OUTSIDE_MASS_WARN,
            residual: sol.outside_mass,
        });
        checks.push(Check {
            name: "source_time_error".into(),
            pass: sol.source_error <= SOURCE_TIME_TOL,
            residual: sol.source_error,
        });
        (sol.field, Some(sol.route))
    };
    let manifest = RunManifest {
        command: command_line(argv),
        version: env!("CARGO_PKG_VERSION").to_string(),
        spec,
        grid,
        quadrature: Some(cfg),
        f: if a.fundamental {
            SourceDescriptor::DiracDelta { center: 0.0 }
        } else {
            a.data.f
        },
        g: Some(a.g),
        source,
        route,
        fundamental: a.fundamental,
        checks,
    };
    write_outputs(&field, &a.out, &manifest, &manifest_path(&a.out, a.manifest))
}

/// The argv with the program path replaced by its name, so manifests do not
/// depend on where the binary lives.
fn command_line(argv: &[String]) -> String {
    std::iter::once("fracgreen")
        .chain(argv.iter().skip(1).map(String::as_str))
        .collect::<Vec<_>>()
        .join(" ")
}

fn oracle(a: OracleArgs, argv: &[String]) -> Result<()> {
    let spec = a.spec.spec()?;
    let grid = a.grid.grid()?;
    let source = a.data.source()?;
    let field = oracle_solve_with_source(&spec, &a.data.f, &source, &grid, &OracleConfig::for_grid(&grid))?;
    let manifest = RunManifest {
        command: command_line(argv),
        version: env!("CARGO_PKG_VERSION").to_string(),
        spec,
        grid,
        quadrature: None,
        f: a.data.f,
        g: None,
        source,
        route: None,
        fundamental: false,
        checks: Vec::new(),
    };
    write_outputs(&field, &a.out, &manifest, &manifest_path(&a.out, a.manifest))
}

fn read_field(path: &Path) -> Result<Field> {
    let file = File::open(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Field::read_csv(BufReader::new(file))
}

fn compare(a: CompareArgs) -> Result<()> {
    let residual = compare_fields(&read_field(&a.field)?, &read_field(&a.reference)?)?;
    let json = serde_json::to_string_pretty(&residual).map_err(|e| Error::Parse(e.to_string()))?;
    let mut out = writer(a.out.as_deref())?;
    writeln!(out, "{json}")?;
    out.flush()?;
    Ok(())
}

fn validate(a: ValidateArgs) -> Result<()> {
    a.spec.spec()?.validate()?;
    println!("ok");
    Ok(())
}
