//! Reference solutions by Grünwald-Letnikov time stepping, one Fourier mode at a
//! time, on the periodically extended grid.
//!
//! Each mode solves `D^α u = −c u + F` (Riemann-Liouville) with `D^{α−1}u(0⁺) = b`,
//! in the equivalent form `u = b t^{α−1}/Γ(α) + I^α F − c I^α u`, with GL weights
//! of order −α for I^α, implicit in u.
//!
//! Near t = 0, u is the series Σ_j a_j t^{σ_j}, `a_j = b(−c)^j/Γ(α(j+1))`,
//! `σ_j = α(j+1) − 1`. On samples of t^σ (value 0 at j = 0) the GL rule is
//! short by a mass ζ(−σ)h^σ at the origin, so the history starts from
//! `u_0 = −Σ ζ(−σ_j) a_j h^{σ_j}` over the powers below 1. The rule also
//! overshoots I^α by `(α/2) h d/dt I^α` to first order; for the powers with
//! σ_j + α < 1 that term is singular at 0 and is subtracted, tapered by
//! `exp(−|c| t^α)` since the series says nothing about u once |c|t^α is large.
//!
//! Modes with |c|h^α > 1 relax within a step; they start from u_0 = 0 with no
//! correction.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fracmath::{gamma_real, rgamma, zeta};
use crate::green::{GreenKind, ProblemSpec};
use crate::operators::gl_weights;
use crate::solver::{Field, SourceDescriptor, SourceTerm, SpaceTimeGrid};

/// Growth of |u| over its free-kernel scale that counts as blow-up.
const BLOWUP: f64 = 1e6;
/// Most series terms used to start a mode.
const MAX_START: usize = 8;
/// |c|·dt^α above which a mode is stiff and starts without correction.
const STIFF: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub dt: f64,
    pub n_steps: usize,
    /// Fourier modes of the periodic grid; equal to nx.
    pub modes: usize,
}

impl OracleConfig {
    /// Steps of size `grid.dt` up to the last output time.
    pub fn for_grid(grid: &SpaceTimeGrid) -> Self {
        let last = grid.times.last().copied().unwrap_or(0.0);
        Self {
            dt: grid.dt,
            n_steps: (last / grid.dt).round() as usize,
            modes: grid.nx,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) || self.n_steps == 0 {
            return Err(Error::InvalidParameter(format!(
                "oracle needs dt > 0 and at least one step (dt = {}, n_steps = {})",
                self.dt, self.n_steps
            )));
        }
        Ok(())
    }
}

/// u(t_n) for n = 1..=n_steps of `D^α u = −c u`, `D^{α−1}u(0⁺) = init_strength`.
pub fn oracle_mode_evolve(
    alpha: f64,
    c: Complex64,
    cfg: &OracleConfig,
    init_strength: Complex64,
) -> Result<Vec<Complex64>> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must lie in (0, 2]")));
    }
    if c.re < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "Re(c) = {} must be non-negative",
            c.re
        )));
    }
    cfg.validate()?;
    Stepper::new(alpha, cfg).evolve(c, init_strength, None)
}

/// Weights shared by all modes with the same α and step.
struct Stepper {
    alpha: f64,
    h: f64,
    n_steps: usize,
    /// GL weights of order −α
    omega: Vec<f64>,
}

impl Stepper {
    fn new(alpha: f64, cfg: &OracleConfig) -> Self {
        Self {
            alpha,
            h: cfg.dt,
            n_steps: cfg.n_steps,
            omega: gl_weights(-alpha, cfg.n_steps).weights,
        }
    }

    /// `forcing[j]` is F at t_j, j = 0..=n_steps.
    fn evolve(&self, c: Complex64, b: Complex64, forcing: Option<&[Complex64]>) -> Result<Vec<Complex64>> {
        let (alpha, h, big_n) = (self.alpha, self.h, self.n_steps);
        let zero = Complex64::new(0.0, 0.0);
        let ha = h.powf(alpha);
        let ch = c * ha;
        let drive = |t: f64| {
            if (alpha - 1.0).abs() < 1e-12 {
                b
            } else {
                b * t.powf(alpha - 1.0) * rgamma(alpha)
            }
        };

        // (a_j, σ_j) for the powers below 1
        let series: Vec<(Complex64, f64)> = if ch.norm() > STIFF {
            Vec::new()
        } else {
            (0..MAX_START)
                .map(|j| {
                    (
                        b * (-c).powu(j as u32) * rgamma(alpha * (j + 1) as f64),
                        alpha * (j + 1) as f64 - 1.0,
                    )
                })
                .take_while(|&(_, e)| e < 1.0)
                .collect()
        };
        let u0: Complex64 = series.iter().map(|&(a, e)| -zeta(-e) * a * h.powf(e)).sum();
        let overshoot = |t: f64| -> Complex64 {
            let taper = (-c.norm() * t.powf(alpha)).exp();
            series
                .iter()
                .filter(|&&(_, e)| e + alpha < 1.0)
                .map(|&(a, e)| a * (gamma_real(e + 1.0) * rgamma(e + alpha) * t.powf(e + alpha - 1.0)))
                .sum::<Complex64>()
                * (0.5 * alpha * h * taper)
        };

        let free = |n: usize| (n as f64 * h).powf(alpha - 1.0) * rgamma(alpha);
        let scale = b.norm() * (1..=big_n).map(free).fold(1.0, f64::max)
            + forcing.map_or(0.0, |f| {
                f.iter().map(|z| z.norm()).fold(0.0, f64::max) * (1.0 + big_n as f64 * h).powi(2)
            });
        let bound = BLOWUP * scale.max(f64::MIN_POSITIVE);

        // u_n + ch·Σ_{j≤n} ω_{n−j} u_j = drive_n + c·overshoot_n + h^α Σ_j ω_{n−j} F_j
        let mut u = Vec::with_capacity(big_n + 1);
        u.push(u0);
        let denom = Complex64::new(1.0, 0.0) + ch;
        for n in 1..=big_n {
            let t = n as f64 * h;
            let mut history = zero;
            for j in 0..n {
                history += self.omega[n - j] * u[j];
            }
            let mut rhs = drive(t) + c * overshoot(t) - ch * history;
            if let Some(f) = forcing {
                rhs += ha * (0..=n).map(|j| self.omega[n - j] * f[j]).sum::<Complex64>();
            }
            let un = rhs / denom;
            if !(un.norm() <= bound) {
                return Err(Error::Instability {
                    step: n,
                    magnitude: un.norm(),
                });
            }
            u.push(un);
        }
        u.remove(0);
        Ok(u)
    }
}

/// Periodic grid transforms with `f*(k) = ∫ e^{ikx} f dx`.
struct Dft {
    n: usize,
    dx: f64,
    x_min: f64,
}

impl Dft {
    fn wavenumber(&self, m: usize) -> f64 {
        let idx = if m < self.n / 2 {
            m as f64
        } else {
            m as f64 - self.n as f64
        };
        2.0 * std::f64::consts::PI * idx / (self.n as f64 * self.dx)
    }

    fn forward(&self, f: &[Complex64]) -> Vec<Complex64> {
        let mut v = f.to_vec();
        FftPlanner::new().plan_fft_inverse(self.n).process(&mut v);
        v.iter()
            .enumerate()
            .map(|(m, z)| z * Complex64::from_polar(self.dx, self.wavenumber(m) * self.x_min))
            .collect()
    }

    fn backward(&self, hat: &[Complex64]) -> Vec<Complex64> {
        let scale = 1.0 / (self.n as f64 * self.dx);
        let mut v: Vec<Complex64> = hat
            .iter()
            .enumerate()
            .map(|(m, z)| z * Complex64::from_polar(scale, -self.wavenumber(m) * self.x_min))
            .collect();
        FftPlanner::new().plan_fft_forward(self.n).process(&mut v);
        v
    }
}

/// Homogeneous reference solution `N = G⋆f` at the grid's output times.
pub fn oracle_solve(
    spec: &ProblemSpec,
    f: &SourceDescriptor,
    grid: &SpaceTimeGrid,
    cfg: &OracleConfig,
) -> Result<Field> {
    run(spec, f, &SourceTerm::Zero, grid, cfg)
}

/// Reference solution with a source; the source enters the forcing of every mode.
pub fn oracle_solve_with_source(
    spec: &ProblemSpec,
    f: &SourceDescriptor,
    source: &SourceTerm,
    grid: &SpaceTimeGrid,
    cfg: &OracleConfig,
) -> Result<Field> {
    run(spec, f, source, grid, cfg)
}

/// Reference solution of the self-coupled problem `N = G3⋆f`.
pub fn oracle_solve_coupled(
    spec: &ProblemSpec,
    f: &SourceDescriptor,
    grid: &SpaceTimeGrid,
    cfg: &OracleConfig,
) -> Result<Field> {
    run(spec, f, &SourceTerm::SelfCoupled, grid, cfg)
}

fn run(
    spec: &ProblemSpec,
    f: &SourceDescriptor,
    source: &SourceTerm,
    grid: &SpaceTimeGrid,
    cfg: &OracleConfig,
) -> Result<Field> {
    spec.validate()?;
    grid.validate()?;
    cfg.validate()?;
    if cfg.modes != grid.nx {
        return Err(Error::InvalidParameter(format!(
            "oracle modes = {} must equal nx = {}",
            cfg.modes, grid.nx
        )));
    }
    let mut steps = Vec::with_capacity(grid.times.len());
    for &t in &grid.times {
        let n = (t / cfg.dt).round();
        if n < 1.0 || (n * cfg.dt - t).abs() > 1e-9 * t || n as usize > cfg.n_steps {
            return Err(Error::InvalidParameter(format!(
                "output time {t} is not a step of dt = {} within {} steps",
                cfg.dt, cfg.n_steps
            )));
        }
        steps.push(n as usize);
    }
    let coupled = matches!(source, SourceTerm::SelfCoupled);
    let forced = !coupled && !source.is_zero() && spec.mu != Complex64::new(0.0, 0.0);
    if forced {
        source.check(grid)?;
    }

    let dft = Dft {
        n: grid.nx,
        dx: grid.dx(),
        x_min: grid.x_min,
    };
    let init = dft.forward(&f.sample(grid)?);
    let source_hat = if forced {
        crate::solver::TransformedSource::new(source, grid, |s| dft.forward(s))?
    } else {
        None
    };
    let biggest = init.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let stepper = Stepper::new(spec.alpha, cfg);
    let kind = if coupled { GreenKind::G3 } else { GreenKind::G };

    let per_mode: Vec<Vec<Complex64>> = (0..grid.nx)
        .into_par_iter()
        .map(|m| -> Result<Vec<Complex64>> {
            let k = dft.wavenumber(m);
            let b = init[m];
            let sigma = spec.source_symbol(k);
            let skip_init = b.norm() <= f64::EPSILON * biggest;
            if skip_init && source_hat.is_none() {
                return Ok(vec![Complex64::new(0.0, 0.0); cfg.n_steps]);
            }
            let b = if skip_init { Complex64::new(0.0, 0.0) } else { b };
            let c = spec.rate(kind, k);
            match &source_hat {
                Some(src) => {
                    let forcing: Vec<Complex64> = (0..=cfg.n_steps)
                        .map(|n| -sigma * src.at(m, n as f64 * cfg.dt))
                        .collect();
                    stepper.evolve(c, b, Some(&forcing))
                }
                None => stepper.evolve(c, b, None),
            }
        })
        .collect::<Result<_>>()?;

    let values = steps
        .iter()
        .map(|&n| {
            let hat: Vec<Complex64> = per_mode.iter().map(|u| u[n - 1]).collect();
            dft.backward(&hat)
        })
        .collect();
    Ok(Field {
        grid: grid.clone(),
        values,
    })
}
